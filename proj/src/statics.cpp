#include "magnetoelast/statics.hpp"

#include "magnetoelast/llg.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>

namespace magnetoelast {

namespace {

// Energy without the m-independent thermal term, so descent tests are not swamped by it.
double magnetic_energy(const RigidMagnet& rm, const Grid& grid, double theta,
                       const Vector3<double>& h_ext, const MagnetizationField& m,
                       const DemagSolver* demag) {
  const Eigen::Index n = m.cols();
  double local = 0;
  for (Eigen::Index c = 0; c < n; ++c) {
    const Vector3<double> mc = m.col(c);
    const double m2 = mc.squaredNorm();
    local += rm.a0 * (theta - rm.theta_c) * m2 + rm.b0 * m2 * m2 - rm.mu0 * h_ext.dot(mc);
  }
  double e = grid.cell_area() * local +
             exchange_energy(grid, ScalarField::Constant(n, rm.kappa), m);
  if (demag) e += demag_energy(demag->solve(m), m, rm.mu0).field_energy;
  return e;
}

}  // namespace

double magnetostatic_energy(const RigidMagnet& rm, const Grid& grid, double theta,
                            const Vector3<double>& h_ext, const MagnetizationField& m,
                            const DemagSolver* demag) {
  const Vector3<double> zero = Vector3<double>::Zero();
  const double thermal = rigid_energy_density<double, 3>(rm, zero, theta);
  return magnetic_energy(rm, grid, theta, h_ext, m, demag) +
         grid.cell_area() * grid.cells() * thermal;
}

MagnetizationField magnetostatic_residual(const RigidMagnet& rm, const Grid& grid, double theta,
                                          const Vector3<double>& h_ext,
                                          const MagnetizationField& m, const DemagSolver* demag) {
  const Eigen::Index n = m.cols();
  MagnetizationField g = -exchange_force(grid, ScalarField::Constant(n, rm.kappa), m);
  for (Eigen::Index c = 0; c < n; ++c)
    g.col(c) += rigid_driving_force<double, 3>(rm, Vector3<double>(m.col(c)), theta) - rm.mu0 * h_ext;
  if (demag) g.topRows<2>() += rm.mu0 * demag->solve(m).grad_u;
  return g;
}

StaticsResult minimize_magnetostatic(const RigidMagnet& rm, const Grid& grid, double theta,
                                     const Vector3<double>& h_ext, const MagnetizationField& m0,
                                     const StaticsOptions& options) {
  if (!(rm.kappa > 0)) throw DomainError("exchange coefficient must be positive");
  if (m0.cols() != grid.cells()) throw DomainError("seed does not match the grid");
  if (m0.cwiseAbs().maxCoeff() == 0 && h_ext.norm() == 0)
    throw DomainError("seed magnetization must not vanish identically");
  std::unique_ptr<DemagSolver> demag;
  if (options.demag) demag = std::make_unique<DemagSolver>(grid, options.pad);

  const double area = grid.cell_area();
  auto energy = [&](const MagnetizationField& m) {
    return magnetic_energy(rm, grid, theta, h_ext, m, demag.get());
  };
  // the energy gradient with respect to the cell values is area times the residual
  auto residual = [&](const MagnetizationField& m) {
    return magnetostatic_residual(rm, grid, theta, h_ext, m, demag.get());
  };

  StaticsResult out;
  out.m = m0;
  double e = energy(out.m);
  MagnetizationField g = residual(out.m);
  out.energies.push_back(e);
  double alpha = 0;
  {
    // first step from the local curvature scale
    const double curv = std::abs(2 * rm.a0 * (theta - rm.theta_c)) +
                        12 * rm.b0 * out.m.colwise().squaredNorm().maxCoeff() +
                        8 * rm.kappa / std::min(grid.hx() * grid.hx(), grid.hy() * grid.hy()) +
                        (options.demag ? rm.mu0 : 0.0);
    alpha = 1.0 / std::max(curv, 1e-12);
  }
  double last_step = std::numeric_limits<double>::infinity();
  for (out.iterations = 0; out.iterations < options.max_iter; ++out.iterations) {
    out.residual = g.cwiseAbs().maxCoeff();
    if (out.residual <= options.tol && last_step <= options.step_tol) break;
    if (out.residual == 0) break;
    const double g2 = area * g.squaredNorm();
    double t = alpha;
    MagnetizationField trial = out.m - t * g;
    double et = energy(trial);
    int backtracks = 0;
    while (et > e - 1e-4 * t * g2 && backtracks < 60) {
      t *= 0.5;
      trial = out.m - t * g;
      et = energy(trial);
      ++backtracks;
    }
    if (et > e) {
      // round-off floor of the energy: keep the iterate if it is already stationary
      if (out.residual <= options.tol) break;
      throw SolverError("magnetostatic descent stalled, residual " + std::to_string(out.residual),
                        out.energies);
    }
    const MagnetizationField gt = residual(trial);
    const MagnetizationField s = trial - out.m;
    const MagnetizationField y = gt - g;
    last_step = s.cwiseAbs().maxCoeff();
    const double sy = s.cwiseProduct(y).sum();
    alpha = sy > 0 ? s.squaredNorm() / sy : 2 * t;
    out.m = trial;
    g = gt;
    e = et;
    out.energies.push_back(e);
  }
  out.energy = magnetostatic_energy(rm, grid, theta, h_ext, out.m, demag.get());
  out.residual = g.cwiseAbs().maxCoeff();
  if (out.iterations >= options.max_iter)
    throw SolverError("magnetostatic minimization hit the iteration cap, residual " +
                          std::to_string(out.residual),
                      out.energies);
  return out;
}

std::vector<CurvePoint> transition_curve(const RigidMagnet& rm, const Grid& grid,
                                         const std::vector<double>& thetas,
                                         const Vector3<double>& h_ext,
                                         const StaticsOptions& options,
                                         std::optional<MagnetizationField> seed) {
  for (std::size_t i = 1; i < thetas.size(); ++i)
    if (!(thetas[i] > thetas[i - 1])) throw DomainError("temperatures must ascend");
  MagnetizationField m;
  if (seed) {
    m = *seed;
  } else {
    m = MagnetizationField::Zero(3, grid.cells());
    const double s0 = thetas.empty() ? 1.0 : saturation_magnetization(rm.a0, rm.b0, rm.theta_c, thetas[0]);
    m.row(0).setConstant(s0 > 0 ? s0 : 1.0);
  }
  std::vector<CurvePoint> curve;
  for (double theta : thetas) {
    if (m.cwiseAbs().maxCoeff() == 0 && h_ext.norm() == 0) {
      // the previous state is the exact critical point m = 0; it stays a minimizer when warmer
      curve.push_back({theta, 0.0, magnetostatic_energy(rm, grid, theta, h_ext, m, nullptr), 0.0});
      continue;
    }
    StaticsResult r = minimize_magnetostatic(rm, grid, theta, h_ext, m, options);
    m = r.m;
    if (m.cwiseAbs().maxCoeff() < std::numeric_limits<double>::min()) m.setZero();
    curve.push_back({theta, m.colwise().norm().mean(), r.energy, r.residual});
  }
  return curve;
}

void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& curve) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << "theta,m_norm,energy,residual\n" << std::setprecision(17);
  for (const CurvePoint& p : curve)
    f << p.theta << ',' << p.m_norm << ',' << p.energy << ',' << p.residual << '\n';
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace magnetoelast
