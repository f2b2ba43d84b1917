#include "magnetoelast/momentum.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace magnetoelast;

namespace {

std::vector<CellClosure> closures(const Material& mat, const Grid& g, const MagnetizationField& m,
                                  double theta) {
  std::vector<CellClosure> out;
  for (int c = 0; c < g.cells(); ++c)
    out.push_back(cell_closure(mat, Regularization{}, Matrix2<double>::Identity(),
                               Vector3<double>(m.col(c)), theta));
  return out;
}

MomentumInput rest_input(const Grid& g) {
  MomentumInput in;
  in.rho = ScalarField::Ones(g.cells());
  in.v = VectorField::Zero(2, g.cells());
  in.stress = MatrixField::Zero(4, g.cells());
  in.force = VectorField::Zero(2, g.cells());
  return in;
}

double kinetic(const Grid& g, const ScalarField& rho, const VectorField& v) {
  return 0.5 * g.cell_area() * (rho.transpose().array() * v.colwise().squaredNorm().array()).sum();
}

VectorField shear(const Grid& g, double amp) {
  VectorField v = VectorField::Zero(2, g.cells());
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) v(0, g.index(i, j)) = amp * std::sin(2 * M_PI * g.y(j));
  return v;
}

}  // namespace

TEST_CASE("stress bundle of the rest state vanishes") {
  const Material mat;
  const Grid g = Grid::unit_square(8, BoundaryMode::box);
  const MagnetizationField m = MagnetizationField::Zero(3, g.cells());
  const StressBundle b = assemble_stresses(g, mat, closures(mat, g, m, 0.5), VectorField::Zero(2, g.cells()), m,
                                           MagnetizationField::Zero(3, g.cells()), AdvectionScheme::upwind1);
  for (const MatrixField* f : {&b.T, &b.K, &b.S, &b.S_exchange, &b.D})
    CHECK(f->cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(b.Hs.cwiseAbs().maxCoeff() == 0.0);
  CHECK(b.Ss.cwiseAbs().maxCoeff() == 0.0);
  CHECK(b.magnetic_force.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stress bundle structure on random fields") {
  const Material mat;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> N(0.0, 1.0);
  const Grid g = Grid::unit_square(10, BoundaryMode::periodic);
  MagnetizationField m = 0.5 * MagnetizationField::NullaryExpr(3, g.cells(), [&] { return N(rng); });
  m.row(2).setZero();
  const MagnetizationField h = MagnetizationField::NullaryExpr(3, g.cells(), [&] { return N(rng); });
  const VectorField v = 0.1 * VectorField::NullaryExpr(2, g.cells(), [&] { return N(rng); });
  const auto cl = closures(mat, g, m, 0.5);
  const StressBundle b = assemble_stresses(g, mat, cl, v, m, h, AdvectionScheme::central2_rk2);
  const MatrixField e = sym_grad(g, v);
  for (int c = 0; c < g.cells(); ++c) {
    const Eigen::Map<const Eigen::Matrix2d> K(b.K.col(c).data()), S(b.S.col(c).data()), T(b.T.col(c).data());
    const Eigen::Map<const Eigen::Matrix2d> ec(e.col(c).data());
    CHECK((K - K.transpose()).norm() <= 1e-12 * std::max(1.0, K.norm()));
    CHECK((S + S.transpose()).norm() <= 1e-12 * std::max(1.0, S.norm()));
    CHECK((T - T.transpose()).norm() <= 1e-12 * std::max(1.0, T.norm()));
    CHECK(std::abs(S.cwiseProduct(ec).sum()) <= 1e-14);
    const Eigen::Map<const Eigen::Matrix2d> D(b.D.col(c).data());
    CHECK(D.cwiseProduct(ec).sum() >= 0);
    // the local driving force is parallel to m for the isotropic energy, so only the field torques
    const Vector3<double> mc = m.col(c), hc = h.col(c);
    const double s = -0.5 * mat.mu0 * (hc(0) * mc(1) - hc(1) * mc(0));
    CHECK(S(0, 1) == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("no forcing keeps the fluid at rest") {
  const Material mat;
  for (BoundaryMode mode : {BoundaryMode::box, BoundaryMode::periodic}) {
    const Grid g = Grid::unit_square(8, mode);
    const MomentumResult r = momentum_step(g, mat, rest_input(g));
    CHECK(r.v.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.viscous_dissipation.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("Stokes-like shear decays monotonically") {
  Material mat;
  mat.p = 2;
  mat.nu2 = 0;
  mat.nu1 = 0.05;
  const Grid g = Grid::unit_square(16, BoundaryMode::periodic);
  MomentumInput in = rest_input(g);
  in.v = shear(g, 0.1);
  in.dt = 0.01;
  double ke = kinetic(g, in.rho, in.v);
  for (int k = 0; k < 20; ++k) {
    const MomentumResult r = momentum_step(g, mat, in);
    const double next = kinetic(g, in.rho, r.v);
    CHECK(next < ke);
    ke = next;
    in.v = r.v;
  }
}

TEST_CASE("manufactured steady shear") {
  Material mat;
  mat.p = 2;
  mat.nu2 = 0;
  mat.nu1 = 1.0;
  auto error = [&](int n) {
    const Grid g = Grid::unit_square(n, BoundaryMode::periodic);
    const VectorField target = shear(g, 1.0);
    MomentumInput in = rest_input(g);
    // div(nu1 e) for v = (sin 2 pi y, 0) is (-2 pi^2 nu1 sin 2 pi y, 0); the force balances it
    in.force = 2 * M_PI * M_PI * mat.nu1 * target;
    in.dt = 1e8;
    in.midpoint = false;
    in.advect = false;
    const MomentumResult r = momentum_step(g, mat, in);
    return (r.v - target).cwiseAbs().maxCoeff();
  };
  const double a = error(16), b = error(32);
  CHECK(a <= 0.1);
  CHECK(a / b >= 3.5);
}

TEST_CASE("kinetic energy identity of the implicit midpoint step") {
  Material mat;
  mat.nu_flat = 0.05;
  std::mt19937_64 rng(6);
  std::normal_distribution<double> N(0.0, 1.0);
  for (BoundaryMode mode : {BoundaryMode::box, BoundaryMode::periodic}) {
    const Grid g = Grid::unit_square(12, mode);
    MomentumInput in = rest_input(g);
    in.v = 0.2 * VectorField::NullaryExpr(2, g.cells(), [&] { return N(rng); });
    in.stress = 0.1 * MatrixField::NullaryExpr(4, g.cells(), [&] { return N(rng); });
    in.force = 0.1 * VectorField::NullaryExpr(2, g.cells(), [&] { return N(rng); });
    in.g = Eigen::Vector2d(0.0, -0.3);
    in.k_traction = 0.2;
    in.dt = 0.01;
    in.advect = true;
    const MomentumResult r = momentum_step(g, mat, in);
    const double dE = kinetic(g, in.rho, r.v) - kinetic(g, in.rho, in.v);
    const double work = in.dt * (r.explicit_power + r.power_gravity + r.power_traction + r.advection_power -
                                 g.cell_area() * r.viscous_dissipation.sum() - r.boundary_dissipation);
    CHECK(std::abs(dE - work) <= 1e-9 * std::max(std::abs(dE), 1e-12));
    CHECK(r.viscous_dissipation.minCoeff() >= 0);
    CHECK(r.boundary_dissipation >= 0);
    CHECK((r.v - (2 * r.v_mid - in.v)).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("backward Euler loses kinetic energy to the jump") {
  Material mat;
  const Grid g = Grid::unit_square(12, BoundaryMode::periodic);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> N(0.0, 1.0);
  MomentumInput in = rest_input(g);
  in.v = 0.2 * VectorField::NullaryExpr(2, g.cells(), [&] { return N(rng); });
  in.force = VectorField::NullaryExpr(2, g.cells(), [&] { return N(rng); });
  in.dt = 0.01;
  in.advect = false;
  in.midpoint = false;
  const MomentumResult r = momentum_step(g, mat, in);
  const double dE = kinetic(g, in.rho, r.v) - kinetic(g, in.rho, in.v);
  const double work = in.dt * (r.explicit_power - g.cell_area() * r.viscous_dissipation.sum());
  const double jump = kinetic(g, in.rho, VectorField(r.v - in.v));
  CHECK(dE == doctest::Approx(work - jump).epsilon(1e-8));
}

TEST_CASE("starting guess changes the work, not the answer") {
  Material mat;
  const Grid g = Grid::unit_square(12, BoundaryMode::box);
  std::mt19937_64 rng(10);
  std::normal_distribution<double> N(0.0, 1.0);
  MomentumInput in = rest_input(g);
  in.v = 0.2 * VectorField::NullaryExpr(2, g.cells(), [&] { return N(rng); });
  in.force = VectorField::NullaryExpr(2, g.cells(), [&] { return N(rng); });
  in.dt = 0.01;
  // tight tolerance so the solutions agree beyond the default stopping error
  MomentumOptions tight;
  tight.tol = 1e-13;
  const MomentumResult cold = momentum_step(g, mat, in, tight);
  in.guess = cold.v_mid + 1e-6 * VectorField::NullaryExpr(2, g.cells(), [&] { return N(rng); });
  const MomentumResult warm = momentum_step(g, mat, in, tight);
  CHECK((warm.v - cold.v).cwiseAbs().maxCoeff() <= 1e-11 * cold.v.cwiseAbs().maxCoeff());
  CHECK(warm.newton_iterations <= cold.newton_iterations);
  in.guess = VectorField::Constant(2, g.cells(), 5.0);
  const MomentumResult far = momentum_step(g, mat, in, tight);
  CHECK((far.v - cold.v).cwiseAbs().maxCoeff() <= 1e-11 * cold.v.cwiseAbs().maxCoeff());
}
