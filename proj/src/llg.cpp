#include "magnetoelast/llg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace magnetoelast {

bool dir_set_test(const Vector3<double>& b, double hc) { return b.norm() <= hc; }

double inclusion_residual(const LLGCellProblem& pb, const Vector3<double>& r) {
  const Vector3<double> rest = pb.b - pb.tau * r + pb.inv_gamma * pb.m.cross(r);
  const double nr = r.norm();
  if (nr == 0.0) return std::max(0.0, rest.norm() - pb.hc);
  return (rest - pb.hc * r / nr).norm();
}

namespace {

// r = (alpha I - g [m]x)^{-1} b in closed form.
Vector3<double> resolvent(double alpha, double g, const Vector3<double>& m, const Vector3<double>& b) {
  const double c2 = g * g * m.squaredNorm();
  return (alpha * alpha * b + alpha * g * m.cross(b) + g * g * m.dot(b) * m) /
         (alpha * (alpha * alpha + c2));
}

}  // namespace

Vector3<double> solve_rate(const LLGCellProblem& pb) {
  if (!(pb.tau > 0) || pb.hc < 0 || pb.inv_gamma < 0) throw DomainError("invalid cell problem");
  const double nb = pb.b.norm();
  if (nb <= pb.hc) return Vector3<double>::Zero();
  const double g = pb.inv_gamma;
  const double nm = pb.m.norm();
  if (g == 0.0 || nm == 0.0) return (nb - pb.hc) / (pb.tau * nb) * pb.b;

  // With s = |r| and alpha = tau + hc/s the inclusion reads (alpha I - g[m]x) r = b.
  // q(s) = |r(alpha(s))|^2 - s^2 is positive below the root and negative above it.
  const Vector3<double> mh = pb.m / nm;
  const double A = std::pow(pb.b.dot(mh), 2);
  const double B = std::max(0.0, nb * nb - A);
  const double c2 = g * g * nm * nm;
  auto q = [&](double s, double& dq) {
    const double alpha = pb.tau + pb.hc / s;
    const double a2 = alpha * alpha;
    const double rho2 = A / a2 + B / (a2 + c2);
    const double drho = -2 * A / (a2 * alpha) - 2 * B * alpha / ((a2 + c2) * (a2 + c2));
    dq = drho * (-pb.hc / (s * s)) - 2 * s;
    return rho2 - s * s;
  };
  double lo = (nb - pb.hc) / (pb.tau + g * nm), hi = (nb - pb.hc) / pb.tau;
  double s = 0.5 * (lo + hi);
  std::vector<double> history;
  for (int it = 0; it < 200; ++it) {
    double dq = 0;
    const double val = q(s, dq);
    history.push_back(val);
    if (val > 0) lo = s; else hi = s;
    double next = dq < 0 ? s - val / dq : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool done = std::abs(next - s) <= 1e-15 * s || hi - lo <= 1e-15 * hi;
    s = next;
    if (done) {
      const Vector3<double> r = resolvent(pb.tau + pb.hc / s, g, pb.m, pb.b);
      const double res = inclusion_residual(pb, r);
      if (res > pb.tol * std::max(1.0, nb))
        throw SolverError("cell inclusion residual " + std::to_string(res) + " above tolerance",
                          history);
      return r;
    }
  }
  throw SolverError("cell inclusion did not converge", history);
}

namespace {

template <typename Visit>
void for_each_face(const Grid& grid, Visit&& visit) {
  const int nx = grid.nx(), ny = grid.ny();
  const int fx = grid.periodic() ? nx : nx - 1;
  const int fy = grid.periodic() ? ny : ny - 1;
  const double wx = 1.0 / (grid.hx() * grid.hx()), wy = 1.0 / (grid.hy() * grid.hy());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < fx; ++i) visit(grid.index(i, j), grid.index((i + 1) % nx, j), wx);
  for (int j = 0; j < fy; ++j)
    for (int i = 0; i < nx; ++i) visit(grid.index(i, j), grid.index(i, (j + 1) % ny), wy);
}

}  // namespace

MagnetizationField exchange_force(const Grid& grid, const ScalarField& k,
                                  const MagnetizationField& m) {
  MagnetizationField f = MagnetizationField::Zero(3, m.cols());
  for_each_face(grid, [&](int L, int R, double w) {
    const Vector3<double> flux = 0.5 * (k(L) + k(R)) * w * (m.col(R) - m.col(L));
    f.col(L) += flux;
    f.col(R) -= flux;
  });
  return f;
}

MagnetizationField exchange_force(const Grid& grid, const Material& mat, const MatrixField& F,
                                  const MagnetizationField& m) {
  ScalarField k(F.cols());
  for (Eigen::Index c = 0; c < F.cols(); ++c) {
    const Eigen::Map<const Eigen::Matrix2d> Fc(F.col(c).data());
    k(c) = exchange_coefficient(mat, Matrix2<double>(Fc)) / detail::checked_det(Matrix2<double>(Fc));
  }
  return exchange_force(grid, k, m);
}

double exchange_energy(const Grid& grid, const ScalarField& k, const MagnetizationField& m) {
  double e = 0.0;
  for_each_face(grid, [&](int L, int R, double w) {
    e += 0.5 * (k(L) + k(R)) * w * (m.col(R) - m.col(L)).squaredNorm();
  });
  return 0.5 * grid.cell_area() * e;
}

LLGResult llg_step(const Grid& grid, const Material& mat, const std::vector<CellClosure>& closures,
                   const MagnetizationField& m, const MagnetizationField& h, double dt,
                   const LLGOptions& options) {
  const Eigen::Index n = m.cols();
  ScalarField k(n);
  for (Eigen::Index c = 0; c < n; ++c) k(c) = closures[c].k;

  // face neighbours and implicit diagonal per cell
  std::vector<std::vector<std::pair<int, double>>> nbrs(n);
  for_each_face(grid, [&](int L, int R, double w) {
    const double kf = 0.5 * (k(L) + k(R)) * w;
    nbrs[L].push_back({R, kf});
    nbrs[R].push_back({L, kf});
  });

  const double mu0 = mat.mu0;
  const MagnetizationField ex0 = exchange_force(grid, k, m);
  MagnetizationField base(3, n);
  for (Eigen::Index c = 0; c < n; ++c)
    base.col(c) = mu0 * h.col(c) - closures[c].t_phi - closures[c].t_zeta + ex0.col(c);
  if (options.planar) base.row(2).setZero();

  LLGResult out;
  out.r = MagnetizationField::Zero(3, n);
  double change = 0.0;
  for (out.sweeps = 1; out.sweeps <= options.max_sweeps; ++out.sweeps) {
    change = 0.0;
    double scale = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
      double diag = 0.0;
      Vector3<double> coupled = Vector3<double>::Zero();
      for (const auto& [o, kf] : nbrs[c]) {
        diag += kf;
        coupled += kf * out.r.col(o);
      }
      LLGCellProblem pb;
      pb.tau = mat.tau + dt * diag / mu0;
      pb.hc = closures[c].hc;
      pb.inv_gamma = options.planar ? 0.0 : closures[c].inv_gamma;
      pb.m = m.col(c);
      pb.b = (base.col(c) + dt * coupled) / mu0;
      pb.tol = 1e-10;
      const Vector3<double> r = solve_rate(pb);
      change = std::max(change, (r - out.r.col(c)).norm());
      scale = std::max(scale, r.norm());
      out.r.col(c) = r;
    }
    if (change <= options.tol * std::max(1.0, scale)) break;
    if (dt == 0.0) break;
  }
  if (out.sweeps > options.max_sweeps)
    throw SolverError("exchange sweeps did not converge, last change " + std::to_string(change));

  out.m = m + dt * out.r;
  out.b = base + dt * (exchange_force(grid, k, out.r));
  out.heat.resize(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const double nr = out.r.col(c).norm();
    out.heat(c) = mu0 * (mat.tau * nr * nr + closures[c].hc * nr);
  }
  return out;
}

}  // namespace magnetoelast
