#include "magnetoelast/momentum.hpp"

#include "magnetoelast/llg.hpp"

#include <cmath>
#include <string>

namespace magnetoelast {

namespace {

Eigen::Matrix2d as_matrix(const MatrixField& f, Eigen::Index c) {
  return Eigen::Map<const Eigen::Matrix2d>(f.col(c).data());
}

void store(MatrixField& f, Eigen::Index c, const Eigen::Matrix2d& M) {
  Eigen::Map<Eigen::Matrix2d>(f.col(c).data()) = M;
}

// skw(a (x) m) restricted to the plane.
Eigen::Matrix2d planar_skw(const Vector3<double>& a, const Vector3<double>& m) {
  const double s = 0.5 * (a(0) * m(1) - a(1) * m(0));
  Eigen::Matrix2d W;
  W << 0, s, -s, 0;
  return W;
}

}  // namespace

StressBundle assemble_stresses(const Grid& grid, const Material& mat,
                               const std::vector<CellClosure>& closures, const VectorField& v,
                               const MagnetizationField& m, const MagnetizationField& h,
                               AdvectionScheme scheme) {
  const Eigen::Index n = grid.cells();
  StressBundle b;
  b.T.resize(4, n);
  b.K.resize(4, n);
  b.S.resize(4, n);
  b.S_exchange.resize(4, n);
  b.D.resize(4, n);
  b.Hs.resize(8, n);
  b.Ss.resize(8, n);

  const MagnetizationGradient gm = magnetization_gradient(grid, m);
  ScalarField k(n);
  for (Eigen::Index c = 0; c < n; ++c) k(c) = closures[c].k;
  const MagnetizationField ex = exchange_force(grid, k, m);
  const MatrixField e = sym_grad(grid, v);
  const Rank3Field G2 = second_grad(grid, v);
  const double hp = (mat.p - 2.0) / 2.0;

  for (Eigen::Index c = 0; c < n; ++c) {
    const CellClosure& cl = closures[c];
    const Eigen::Map<const Matrix32<double>> grad_m(gm.col(c).data());
    store(b.T, c, cl.T_phi + cl.T_zeta + grad_m.squaredNorm() * cl.T_kappa);
    store(b.K, c, cl.k * grad_m.transpose() * grad_m);
    const Vector3<double> mc = m.col(c);
    const Vector3<double> drive = mat.mu0 * h.col(c) - cl.t_phi - cl.t_zeta;
    store(b.S, c, -planar_skw(drive, mc));
    store(b.S_exchange, c, -planar_skw(ex.col(c), mc));
    const Eigen::Matrix2d ec = as_matrix(e, c);
    store(b.D, c, mat.nu1 * std::pow(ec.squaredNorm(), hp) * ec);
    b.Hs.col(c) = mat.nu2 * std::pow(G2.col(c).squaredNorm(), hp) * G2.col(c);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int d = 0; d < 2; ++d)
          b.Ss(i + 2 * j + 4 * d, c) =
              cl.k * 0.5 * (mc(i) * grad_m(j, d) - mc(j) * grad_m(i, d));
  }

  b.kelvin = VectorField::Zero(2, n);
  ScalarField hm(n);
  for (Eigen::Index c = 0; c < n; ++c) hm(c) = h.col(c).dot(m.col(c));
  for (int comp = 0; comp < 3; ++comp) {
    const VectorField gh = grad(grid, ScalarField(h.row(comp).transpose()));
    b.kelvin.row(0) += mat.mu0 * gh.row(0).cwiseProduct(m.row(comp));
    b.kelvin.row(1) += mat.mu0 * gh.row(1).cwiseProduct(m.row(comp));
  }
  b.zeeman_pressure = mat.mu0 * grad(grid, hm);
  b.magnetic_force = -mat.mu0 * advection_power_gradient<3>(grid, v, m, h, scheme);
  return b;
}

namespace {

struct WallFace {
  int cell;
  int comp;     // velocity component tangential to the wall
  double sign;  // counter-clockwise tangent orientation along that component
  double len;
};

std::vector<WallFace> wall_faces(const Grid& grid) {
  std::vector<WallFace> faces;
  if (grid.periodic()) return faces;
  const int nx = grid.nx(), ny = grid.ny();
  for (int i = 0; i < nx; ++i) faces.push_back({grid.index(i, 0), 0, 1.0, grid.hx()});
  for (int j = 0; j < ny; ++j) faces.push_back({grid.index(nx - 1, j), 1, 1.0, grid.hy()});
  for (int i = 0; i < nx; ++i) faces.push_back({grid.index(i, ny - 1), 0, -1.0, grid.hx()});
  for (int j = 0; j < ny; ++j) faces.push_back({grid.index(0, j), 1, -1.0, grid.hy()});
  return faces;
}

// Per-cell p-power potential nu/p |y|^p on a block of dimension Dim with a fixed
// linear projection P (identity or the symmetric-part map).
template <int Dim>
struct PowerBlocks {
  double nu = 0, p = 4;
  bool symmetric = false;  // Dim == 4 and project onto the symmetric part
  Eigen::Matrix<double, Dim, Eigen::Dynamic> y;  // projected argument per cell
  Eigen::VectorXd alpha, beta;

  Eigen::Matrix<double, Dim, 1> project(const Eigen::Matrix<double, Dim, 1>& z) const {
    if (!symmetric) return z;
    Eigen::Matrix<double, Dim, 1> out = z;
    out(1) = out(2) = 0.5 * (z(1) + z(2));
    return out;
  }

  void update(const Eigen::VectorXd& raw, Eigen::Index n) {
    y.resize(Dim, n);
    alpha.resize(n);
    beta.resize(n);
    for (Eigen::Index c = 0; c < n; ++c) {
      Eigen::Matrix<double, Dim, 1> z;
      for (int a = 0; a < Dim; ++a) z(a) = raw(a * n + c);
      y.col(c) = project(z);
      const double s2 = y.col(c).squaredNorm();
      alpha(c) = nu * std::pow(s2, (p - 2) / 2);
      beta(c) = s2 > 0 ? nu * (p - 2) * std::pow(s2, (p - 4) / 2) : 0.0;
    }
  }

  double energy() const {
    double e = 0;
    for (Eigen::Index c = 0; c < y.cols(); ++c) e += nu / p * std::pow(y.col(c).squaredNorm(), p / 2);
    return e;
  }

  // Gradient of the potential with respect to the raw argument, blocked.
  Eigen::VectorXd gradient() const {
    const Eigen::Index n = y.cols();
    Eigen::VectorXd g(Dim * n);
    for (Eigen::Index c = 0; c < n; ++c)
      for (int a = 0; a < Dim; ++a) g(a * n + c) = alpha(c) * y(a, c);
    return g;
  }

  Eigen::VectorXd hessian_apply(const Eigen::VectorXd& raw) const {
    const Eigen::Index n = y.cols();
    Eigen::VectorXd out(Dim * n);
    for (Eigen::Index c = 0; c < n; ++c) {
      Eigen::Matrix<double, Dim, 1> z;
      for (int a = 0; a < Dim; ++a) z(a) = raw(a * n + c);
      const Eigen::Matrix<double, Dim, 1> pz = project(z);
      const Eigen::Matrix<double, Dim, 1> hz = alpha(c) * pz + beta(c) * y.col(c).dot(pz) * y.col(c);
      for (int a = 0; a < Dim; ++a) out(a * n + c) = hz(a);
    }
    return out;
  }

  // Approximate diagonal of M^T H M for the preconditioner.
  void add_diagonal(const SparseMatrix& M, double w, Eigen::VectorXd& diag) const {
    const Eigen::Index n = y.cols();
    for (int col = 0; col < M.outerSize(); ++col)
      for (SparseMatrix::InnerIterator it(M, col); it; ++it) {
        const Eigen::Index c = it.row() % n;
        const int a = static_cast<int>(it.row() / n);
        const double pa = symmetric && (a == 1 || a == 2) ? 0.5 : 1.0;
        diag(col) += w * it.value() * it.value() * (alpha(c) * pa + beta(c) * y(a, c) * y(a, c));
      }
  }
};

}  // namespace

MomentumResult momentum_step(const Grid& grid, const Material& mat, const MomentumInput& in,
                             const MomentumOptions& options) {
  const Eigen::Index n = grid.cells();
  const double area = grid.cell_area();
  const double dt = in.dt;
  const SparseMatrix& G = grid.velocity_gradient_matrix();
  const SparseMatrix& G2 = grid.velocity_second_gradient_matrix();
  const std::vector<WallFace> walls = wall_faces(grid);

  // explicit force density, blocked
  VectorField f = in.force;
  for (Eigen::Index c = 0; c < n; ++c) f.col(c) += in.rho(c) * in.g;
  VectorField adv = VectorField::Zero(2, n);
  if (in.advect) {
    adv = advection<2>(grid, in.v, in.v, in.scheme);
    for (Eigen::Index c = 0; c < n; ++c) adv.col(c) *= in.rho(c);
  }
  const Eigen::VectorXd f_stress = -(G.transpose() * blocked<4>(in.stress));
  const Eigen::VectorXd f_body = blocked<2>(f);
  const Eigen::VectorXd f_adv = -blocked<2>(adv);

  Eigen::VectorXd mass(2 * n);
  mass << in.rho, in.rho;
  mass *= (in.midpoint ? 2.0 : 1.0) * area / dt;
  Eigen::VectorXd rhs = mass.cwiseProduct(blocked<2>(in.v)) + area * (f_stress + f_body + f_adv);
  for (const WallFace& w : walls) rhs(w.comp * n + w.cell) += w.len * in.k_traction * w.sign;

  PowerBlocks<4> visc;
  visc.nu = mat.nu1;
  visc.p = mat.p;
  visc.symmetric = true;
  PowerBlocks<8> hyper;
  hyper.nu = mat.nu2;
  hyper.p = mat.p;
  const double p = mat.p;

  auto wall_energy = [&](const Eigen::VectorXd& x) {
    double e = 0;
    for (const WallFace& w : walls) e += w.len * mat.nu_flat / p * std::pow(std::abs(x(w.comp * n + w.cell)), p);
    return e;
  };
  auto functional = [&](const Eigen::VectorXd& x) {
    PowerBlocks<4> vb = visc;
    PowerBlocks<8> hb = hyper;
    vb.update(G * x, n);
    hb.update(G2 * x, n);
    return 0.5 * x.dot(mass.cwiseProduct(x)) - rhs.dot(x) + area * (vb.energy() + hb.energy()) +
           wall_energy(x);
  };

  Eigen::VectorXd x = blocked<2>(in.guess.cols() == n ? in.guess : in.v);
  MomentumResult out;
  double phi = functional(x);
  const double scale = rhs.norm() + mass.cwiseProduct(x).norm() + 1e-300;
  bool converged = false;
  for (int it = 0; it <= options.max_newton; ++it) {
    visc.update(G * x, n);
    hyper.update(G2 * x, n);
    Eigen::VectorXd grad = mass.cwiseProduct(x) - rhs + area * (G.transpose() * visc.gradient()) +
                           area * (G2.transpose() * hyper.gradient());
    Eigen::VectorXd wall_diag = Eigen::VectorXd::Zero(2 * n);
    for (const WallFace& w : walls) {
      const double vt = x(w.comp * n + w.cell);
      grad(w.comp * n + w.cell) += w.len * mat.nu_flat * std::pow(std::abs(vt), p - 2) * vt;
      wall_diag(w.comp * n + w.cell) += w.len * mat.nu_flat * (p - 1) * std::pow(std::abs(vt), p - 2);
    }
    const double gnorm = grad.norm();
    out.history.push_back(gnorm);
    if (gnorm <= options.tol * scale) {
      converged = true;
      out.newton_iterations = it;
      break;
    }
    if (it == options.max_newton) break;

    auto hess = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
      return mass.cwiseProduct(y) + wall_diag.cwiseProduct(y) +
             area * (G.transpose() * visc.hessian_apply(G * y)) +
             area * (G2.transpose() * hyper.hessian_apply(G2 * y));
    };
    Eigen::VectorXd diag = mass + wall_diag;
    visc.add_diagonal(G, area, diag);
    hyper.add_diagonal(G2, area, diag);
    const Eigen::VectorXd inv_diag = diag.cwiseInverse();

    // preconditioned conjugate gradients for the Newton direction
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(2 * n);
    Eigen::VectorXd res = -grad;
    Eigen::VectorXd z = inv_diag.cwiseProduct(res);
    Eigen::VectorXd q = z;
    double rz = res.dot(z);
    const double rnorm0 = res.norm();
    for (int k = 0; k < 2000 && res.norm() > options.cg_tol * rnorm0; ++k) {
      const Eigen::VectorXd Aq = hess(q);
      const double step = rz / q.dot(Aq);
      dir += step * q;
      res -= step * Aq;
      z = inv_diag.cwiseProduct(res);
      const double rz_new = res.dot(z);
      q = z + (rz_new / rz) * q;
      rz = rz_new;
    }

    // Armijo backtracking on the convex functional
    // near the minimizer the decrease drops below round-off in the functional; steps within that
    // band are judged by the gradient on the next pass
    const double slope = grad.dot(dir);
    const double noise = 1e-13 * (std::abs(phi) + 1.0);
    double t = 1.0;
    double trial = functional(x + dir);
    while (trial > phi + 1e-4 * t * slope + noise && t > 1e-12) {
      t *= 0.5;
      trial = functional(x + t * dir);
    }
    if (!(trial <= phi + noise)) {
      // no decrease possible at round-off level: accept the current iterate if close
      if (gnorm <= 1e3 * options.tol * scale) {
        converged = true;
        out.newton_iterations = it;
        break;
      }
      throw SolverError("momentum line search failed", out.history);
    }
    x += t * dir;
    phi = trial;
  }
  if (!converged) throw SolverError("momentum Newton did not converge", out.history);

  out.v_mid = unblocked<2>(x);
  out.v = in.midpoint ? VectorField(2.0 * out.v_mid - in.v) : out.v_mid;
  visc.update(G * x, n);
  hyper.update(G2 * x, n);
  out.e = unblocked<4>(G * x);
  {
    const Eigen::RowVectorXd off = 0.5 * (out.e.row(1) + out.e.row(2));
    out.e.row(1) = off;
    out.e.row(2) = off;
  }
  out.G2 = unblocked<8>(G2 * x);
  out.viscous_dissipation.resize(n);
  for (Eigen::Index c = 0; c < n; ++c)
    out.viscous_dissipation(c) = mat.nu1 * std::pow(out.e.col(c).squaredNorm(), p / 2) +
                                 mat.nu2 * std::pow(out.G2.col(c).squaredNorm(), p / 2);
  if (!grid.periodic()) {
    out.navier.bottom = Eigen::VectorXd::Zero(grid.nx());
    out.navier.top = Eigen::VectorXd::Zero(grid.nx());
    out.navier.left = Eigen::VectorXd::Zero(grid.ny());
    out.navier.right = Eigen::VectorXd::Zero(grid.ny());
    const int nx = grid.nx(), ny = grid.ny();
    for (std::size_t k = 0; k < walls.size(); ++k) {
      const WallFace& w = walls[k];
      const double vt = x(w.comp * n + w.cell);
      const double rate = mat.nu_flat * std::pow(std::abs(vt), p);
      out.boundary_dissipation += w.len * rate;
      out.power_traction += w.len * in.k_traction * w.sign * vt;
      const int s = static_cast<int>(k);
      if (s < nx) out.navier.bottom(s) = rate;
      else if (s < nx + ny) out.navier.right(s - nx) = rate;
      else if (s < 2 * nx + ny) out.navier.top(s - nx - ny) = rate;
      else out.navier.left(s - 2 * nx - ny) = rate;
    }
  }
  for (Eigen::Index c = 0; c < n; ++c)
    out.power_gravity += area * in.rho(c) * in.g.dot(out.v_mid.col(c));
  out.explicit_power = area * (f_stress + blocked<2>(in.force)).dot(x);
  out.advection_power = area * f_adv.dot(x);
  return out;
}

}  // namespace magnetoelast
