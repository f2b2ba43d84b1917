#include "magnetoelast/heat.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <cmath>
#include <string>

namespace magnetoelast {

AdiabaticSources adiabatic_sources(const std::vector<CellClosure>& closures, const MatrixField& e,
                                   const MatrixField& L, const MagnetizationField& m,
                                   const MagnetizationField& r, SpinSign sign) {
  const Eigen::Index n = m.cols();
  AdiabaticSources out{ScalarField(n), ScalarField(n)};
  const MagnetizationField Wm = spin(L, m);
  const double s = sign == SpinSign::plus ? 1.0 : -1.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::Map<const Eigen::Matrix2d> ec(e.col(c).data());
    out.from_F(c) = closures[c].T_zeta.cwiseProduct(ec).sum();
    out.from_m(c) = closures[c].t_zeta.dot(r.col(c) + s * Wm.col(c));
  }
  return out;
}

ScalarField wall_density(const Grid& grid) {
  ScalarField out = ScalarField::Zero(grid.cells());
  if (grid.periodic()) return out;
  const double area = grid.cell_area();
  for (int i = 0; i < grid.nx(); ++i) {
    out(grid.index(i, 0)) += grid.hx() / area;
    out(grid.index(i, grid.ny() - 1)) += grid.hx() / area;
  }
  for (int j = 0; j < grid.ny(); ++j) {
    out(grid.index(0, j)) += grid.hy() / area;
    out(grid.index(grid.nx() - 1, j)) += grid.hy() / area;
  }
  return out;
}

SparseMatrix conduction_matrix(const Grid& grid, const ScalarField& k) {
  const SparseMatrix& Dx = grid.face_dx();
  const SparseMatrix& Dy = grid.face_dy();
  const ScalarField kx = 0.5 * grid.hx() * (Dx.cwiseAbs() * k);
  const ScalarField ky = 0.5 * grid.hy() * (Dy.cwiseAbs() * k);
  SparseMatrix Lx = Dx.transpose() * kx.asDiagonal() * Dx;
  SparseMatrix Ly = Dy.transpose() * ky.asDiagonal() * Dy;
  return -(Lx + Ly);
}

namespace {

ScalarField enthalpy_field(const Material& mat, const MatrixField& F, const MagnetizationField& m,
                           const ScalarField& theta, ScalarField* capacity) {
  const Eigen::Index n = theta.size();
  ScalarField w(n);
  if (capacity) capacity->resize(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Matrix2<double> Fc = Eigen::Map<const Eigen::Matrix2d>(F.col(c).data());
    const Vector3<double> mc = m.col(c);
    w(c) = enthalpy(mat, Fc, mc, theta(c));
    if (capacity) (*capacity)(c) = heat_capacity(mat, Fc, mc, theta(c));
  }
  return w;
}

}  // namespace

HeatResult heat_step(const Grid& grid, const Material& mat,
                     const std::vector<CellClosure>& closures, const MatrixField& F,
                     const MagnetizationField& m, const ScalarField& w, const ScalarField& theta,
                     const VectorField& v_adv, const HeatSources& sources,
                     const HeatBoundary& boundary, const TransportStep& step,
                     const HeatOptions& options) {
  const Eigen::Index n = w.size();
  const double dt = step.dt;
  const double area = grid.cell_area();
  const bool allow_negative = mat.eps_reg > 0;

  ScalarField wstar = advance_conserved(grid, w, v_adv, step);
  const ScalarField adiabatic = sources.adiabatic.from_F + sources.adiabatic.from_m;
  ScalarField navier = ScalarField::Zero(n);
  HeatResult out;
  if (!grid.periodic() && sources.navier.bottom.size() == grid.nx()) {
    const int nx = grid.nx(), ny = grid.ny();
    for (int i = 0; i < nx; ++i) {
      navier(grid.index(i, 0)) += 0.5 * sources.navier.bottom(i) * grid.hx() / area;
      navier(grid.index(i, ny - 1)) += 0.5 * sources.navier.top(i) * grid.hx() / area;
    }
    for (int j = 0; j < ny; ++j) {
      navier(grid.index(nx - 1, j)) += 0.5 * sources.navier.right(j) * grid.hy() / area;
      navier(grid.index(0, j)) += 0.5 * sources.navier.left(j) * grid.hy() / area;
    }
  }
  wstar += dt * (sources.xi + adiabatic + navier);
  out.source_power = area * (sources.xi + adiabatic).sum();
  out.adiabatic_power = area * adiabatic.sum();
  out.navier_power = area * navier.sum();
  if (!allow_negative && wstar.minCoeff() < 0)
    throw PositivityError("enthalpy became negative before diffusion");

  ScalarField k(n);
  for (Eigen::Index c = 0; c < n; ++c) k(c) = closures[c].cond;
  const SparseMatrix L = conduction_matrix(grid, k);
  const ScalarField beta = boundary.kappa_b * wall_density(grid);

  // Newton on omega(theta) - dt L theta - dt beta (theta_ext - theta) = w*
  ScalarField th = theta;
  ScalarField cap;
  // the Jacobian is SPD and diagonally dominant through the capacity; Jacobi CG beats a factorization
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> solver;
  solver.setTolerance(1e-14);
  solver.setMaxIterations(10 * static_cast<int>(n) + 100);
  const double scale = wstar.cwiseAbs().maxCoeff() + 1e-300;
  bool converged = false;
  for (int it = 0; it < options.max_newton; ++it) {
    const ScalarField om = enthalpy_field(mat, F, m, th, &cap);
    const ScalarField res =
        om - dt * (L * th) - dt * beta.cwiseProduct(ScalarField::Constant(n, boundary.theta_ext) - th) -
        wstar;
    out.newton_iterations = it;
    if (res.cwiseAbs().maxCoeff() <= options.tol * scale) {
      converged = true;
      break;
    }
    SparseMatrix J = -dt * L;
    J.diagonal() += cap + dt * beta;
    solver.compute(J);
    ScalarField next = th - solver.solve(res);
    if (solver.info() != Eigen::Success) throw SolverError("heat linear solve did not converge");
    if (!allow_negative) {
      // keep the iterate admissible; the map is monotone so halving toward the old iterate works
      for (Eigen::Index c = 0; c < n; ++c)
        if (next(c) < 0) next(c) = 0.5 * th(c);
    }
    th = next;
  }
  if (!converged) throw SolverError("heat Newton did not converge");

  out.w = wstar + dt * (L * th) +
          dt * beta.cwiseProduct(ScalarField::Constant(n, boundary.theta_ext) - th);
  out.exchange_power =
      area * beta.cwiseProduct(ScalarField::Constant(n, boundary.theta_ext) - th).sum();
  if (!allow_negative && out.w.minCoeff() < 0)
    throw PositivityError("enthalpy became negative: min w = " + std::to_string(out.w.minCoeff()));
  out.theta.resize(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Matrix2<double> Fc = Eigen::Map<const Eigen::Matrix2d>(F.col(c).data());
    out.theta(c) = invert_enthalpy(mat, Fc, Vector3<double>(m.col(c)), out.w(c));
  }
  return out;
}

}  // namespace magnetoelast
