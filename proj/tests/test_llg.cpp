#include "magnetoelast/llg.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace magnetoelast;

namespace {

// Damped fixed point r <- (b + g m x r - hc r/|r|)/tau, used as an independent oracle.
Vector3<double> fixed_point_rate(const LLGCellProblem& p) {
  if (p.b.norm() <= p.hc) return Vector3<double>::Zero();
  Vector3<double> r = p.b / p.tau;
  for (int it = 0; it < 200000; ++it) {
    const Vector3<double> dir = r.norm() > 0 ? Vector3<double>(r / r.norm()) : Vector3<double>::Zero();
    const Vector3<double> next = (p.b + p.inv_gamma * p.m.cross(r) - p.hc * dir) / p.tau;
    const Vector3<double> upd = 0.5 * r + 0.5 * next;
    if ((upd - r).norm() <= 1e-15 * (1 + r.norm())) return upd;
    r = upd;
  }
  return r;
}

}  // namespace

TEST_CASE("stick set") {
  CHECK(dir_set_test(Vector3<double>::Zero(), 0.3));
  CHECK(dir_set_test(Vector3<double>(0.3, 0, 0), 0.3));
  CHECK_FALSE(dir_set_test(Vector3<double>(0.3 * 1.0001, 0, 0), 0.3));
  LLGCellProblem p;
  p.hc = 0.5;
  p.b = Vector3<double>(0.3, 0.4, 0);
  CHECK(solve_rate(p).norm() == 0.0);
}

TEST_CASE("collinear closed form") {
  LLGCellProblem p;
  p.hc = 1;
  p.tau = 1;
  p.b = Vector3<double>(2, 0, 0);
  const Vector3<double> r = solve_rate(p);
  CHECK(r(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(r(1)) + std::abs(r(2)) == 0.0);
  CHECK((p.tau * r + p.hc * r / r.norm() - p.b).norm() <= 1e-14);
}

TEST_CASE("viscous limit") {
  LLGCellProblem p;
  p.b = Vector3<double>(0.3, -1.2, 0.5);
  CHECK((solve_rate(p) - p.b).norm() <= 1e-15);
}

TEST_CASE("gyroscopic problems agree with the fixed-point oracle") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    LLGCellProblem p;
    p.hc = 0.5;
    p.tau = 1;
    p.inv_gamma = 0.3;
    p.m = Vector3<double>(0, 0, 1);
    p.b = 2 * Vector3<double>(N(rng), N(rng), N(rng)).normalized();
    const Vector3<double> r = solve_rate(p);
    CHECK(inclusion_residual(p, r) <= 1e-10);
    CHECK((r - fixed_point_rate(p)).norm() <= 1e-10);
    CHECK(std::abs(p.m.cross(r).dot(r)) <= 1e-14);
  }
}

TEST_CASE("Gilbert form without dry friction") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    LLGCellProblem p;
    p.tau = 0.5 + std::abs(N(rng));
    p.inv_gamma = std::abs(N(rng));
    p.m = Vector3<double>(N(rng), N(rng), N(rng));
    p.b = Vector3<double>(N(rng), N(rng), N(rng));
    const Vector3<double> r = solve_rate(p);
    CHECK((p.tau * r - p.inv_gamma * p.m.cross(r) - p.b).norm() <= 1e-12 * (1 + p.b.norm()));
    // power balance: b.r = tau |r|^2 since the gyroscopic term does no work
    CHECK(p.b.dot(r) == doctest::Approx(p.tau * r.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("exchange force") {
  SUBCASE("uniform magnetization") {
    const Grid g = Grid::unit_square(12, BoundaryMode::box);
    MagnetizationField m = MagnetizationField::Zero(3, g.cells());
    m.row(0).setConstant(0.7);
    CHECK(exchange_force(g, ScalarField::Constant(g.cells(), 0.01), m).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("spectral symbol") {
    auto err = [](int n) {
      const Grid g = Grid::unit_square(n, BoundaryMode::periodic);
      MagnetizationField m = MagnetizationField::Zero(3, g.cells());
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) m(0, g.index(i, j)) = std::sin(2 * M_PI * g.x(i));
      const double k = 0.3;
      const MagnetizationField f = exchange_force(g, ScalarField::Constant(g.cells(), k), m);
      return (f + k * 4 * M_PI * M_PI * m).cwiseAbs().maxCoeff();
    };
    const double a = err(32), b = err(64);
    CHECK(a <= 0.3 * 4 * M_PI * M_PI * 0.01);
    CHECK(a / b >= 3.5);
  }
  SUBCASE("summation by parts and energy") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_real_distribution<double> U(0.5, 1.5);
    for (BoundaryMode mode : {BoundaryMode::box, BoundaryMode::periodic}) {
      const Grid g = Grid::unit_square(10, mode);
      const ScalarField k = ScalarField::NullaryExpr(g.cells(), [&] { return U(rng); });
      const MagnetizationField a = MagnetizationField::NullaryExpr(3, g.cells(), [&] { return N(rng); });
      const MagnetizationField b = MagnetizationField::NullaryExpr(3, g.cells(), [&] { return N(rng); });
      // symmetric: <f(a), b> = <a, f(b)>, and <f(a), a> = -2 E(a)
      const double ab = inner(g, exchange_force(g, k, a), b), ba = inner(g, a, exchange_force(g, k, b));
      CHECK(std::abs(ab - ba) <= 1e-10 * std::abs(ab));
      CHECK(inner(g, exchange_force(g, k, a), a) == doctest::Approx(-2 * exchange_energy(g, k, a)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Gilbert step") {
  Material mat;
  const Regularization reg;
  const Grid g = Grid::unit_square(8, BoundaryMode::periodic);
  const double theta = 0.5;
  auto closures_for = [&](const MagnetizationField& m) {
    std::vector<CellClosure> cl;
    for (int c = 0; c < g.cells(); ++c)
      cl.push_back(cell_closure(mat, reg, Matrix2<double>::Identity(), Vector3<double>(m.col(c)), theta));
    return cl;
  };
  SUBCASE("equilibrium stays put") {
    MagnetizationField m = MagnetizationField::Zero(3, g.cells());
    m.row(0).setConstant(equilibrium_magnetization(mat, theta));
    const LLGResult out = llg_step(g, mat, closures_for(m), m, MagnetizationField::Zero(3, g.cells()), 0.1);
    CHECK(out.r.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(out.heat.cwiseAbs().maxCoeff() <= 1e-20);
  }
  SUBCASE("driven cells dissipate and satisfy the inclusion") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N(0.0, 1.0);
    MagnetizationField m = 0.5 * MagnetizationField::NullaryExpr(3, g.cells(), [&] { return N(rng); });
    m.row(2).setZero();
    MagnetizationField h = MagnetizationField::Zero(3, g.cells());
    h.row(0).setConstant(0.4);
    const auto cl = closures_for(m);
    const double dt = 0.05;
    const LLGResult out = llg_step(g, mat, cl, m, h, dt);
    CHECK(out.heat.minCoeff() >= 0);
    CHECK((out.m - (m + dt * out.r)).cwiseAbs().maxCoeff() <= 1e-15);
    for (int c = 0; c < g.cells(); ++c) {
      LLGCellProblem p;
      p.tau = mat.tau;
      p.hc = cl[c].hc;
      p.b = out.b.col(c) / mat.mu0;
      CHECK(inclusion_residual(p, Vector3<double>(out.r.col(c))) <= 1e-10);
      CHECK(out.heat(c) == doctest::Approx(mat.mu0 * (mat.tau * out.r.col(c).squaredNorm() + cl[c].hc * out.r.col(c).norm())));
    }
    CHECK(out.r.row(2).cwiseAbs().maxCoeff() == 0.0);
  }
}
