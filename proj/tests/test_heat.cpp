#include "magnetoelast/heat.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace magnetoelast;

namespace {

struct Setup {
  Grid grid;
  Material mat;
  MatrixField F;
  MagnetizationField m;
  ScalarField theta;
  ScalarField w;
  std::vector<CellClosure> closures;

  Setup(int n, BoundaryMode mode, double m0 = 0.0) : grid(Grid::unit_square(n, mode)) {
    F = MatrixField::Zero(4, grid.cells());
    F.row(0).setOnes();
    F.row(3).setOnes();
    m = MagnetizationField::Zero(3, grid.cells());
    m.row(0).setConstant(m0);
    theta = ScalarField::Constant(grid.cells(), 0.5);
    refresh();
  }
  void refresh() {
    w.resize(grid.cells());
    closures.clear();
    for (int c = 0; c < grid.cells(); ++c) {
      const Matrix2<double> Fc = Eigen::Map<const Eigen::Matrix2d>(F.col(c).data());
      w(c) = enthalpy(mat, Fc, Vector3<double>(m.col(c)), theta(c));
      closures.push_back(cell_closure(mat, Regularization{}, Fc, Vector3<double>(m.col(c)), theta(c)));
    }
  }
  HeatSources no_sources() const {
    const Eigen::Index n = grid.cells();
    return HeatSources{ScalarField::Zero(n), {ScalarField::Zero(n), ScalarField::Zero(n)}, {}};
  }
  HeatResult step(const HeatSources& s, const HeatBoundary& b, double dt,
                  const VectorField* v = nullptr) const {
    const VectorField zero = VectorField::Zero(2, grid.cells());
    return heat_step(grid, mat, closures, F, m, w, theta, v ? *v : zero, s, b,
                     {dt, AdvectionScheme::upwind1, 0.4});
  }
};

}  // namespace

TEST_CASE("insulated body at rest keeps its temperature") {
  Setup s(12, BoundaryMode::box, 0.4);
  const HeatResult r = s.step(s.no_sources(), {}, 0.05);
  CHECK((r.theta - s.theta).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((r.w - s.w).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("pure conduction conserves heat and relaxes to the mean") {
  Setup s(16, BoundaryMode::periodic);
  for (int j = 0; j < 16; ++j)
    for (int i = 0; i < 16; ++i)
      s.theta(s.grid.index(i, j)) = 0.5 + 0.2 * std::cos(2 * M_PI * s.grid.x(i));
  s.refresh();
  const double total = s.w.sum();
  std::vector<double> amp;
  for (int k = 0; k < 10; ++k) {
    const HeatResult r = s.step(s.no_sources(), {}, 0.5);
    CHECK(std::abs(r.w.sum() - total) <= 1e-12 * total);
    s.theta = r.theta;
    s.w = r.w;
    amp.push_back(s.theta.maxCoeff() - s.theta.minCoeff());
  }
  // geometric decay: the ratio of successive amplitudes is constant below one
  for (std::size_t k = 1; k + 1 < amp.size(); ++k) {
    CHECK(amp[k] < amp[k - 1]);
    CHECK(amp[k + 1] / amp[k] == doctest::Approx(amp[k] / amp[k - 1]).epsilon(1e-8));
  }
}

TEST_CASE("dissipated power ends up as heat") {
  Setup s(10, BoundaryMode::box);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  HeatSources src = s.no_sources();
  src.xi = ScalarField::NullaryExpr(s.grid.cells(), [&] { return U(rng); });
  const double dt = 0.01;
  const HeatResult r = s.step(src, {}, dt);
  const double gain = s.grid.cell_area() * (r.w - s.w).sum();
  const double oracle = dt * s.grid.cell_area() * src.xi.sum();
  CHECK(std::abs(gain - oracle) <= 1e-10 * oracle);
  CHECK(r.source_power == doctest::Approx(oracle / dt).epsilon(1e-14));
}

TEST_CASE("boundary exchange is the only flux through the walls") {
  Setup s(10, BoundaryMode::box);
  const HeatBoundary hb{0.5, 1.0};
  const double dt = 0.02;
  const HeatResult r = s.step(s.no_sources(), hb, dt);
  const double gain = s.grid.cell_area() * (r.w - s.w).sum();
  CHECK(gain > 0);
  CHECK(gain == doctest::Approx(dt * r.exchange_power).epsilon(1e-12));
  // cold surroundings cool the body without driving it below zero
  Setup c(10, BoundaryMode::box);
  HeatResult q = c.step(c.no_sources(), {50.0, 0.0}, 1.0);
  CHECK(q.theta.minCoeff() >= 0);
  CHECK(q.exchange_power < 0);
}

TEST_CASE("wall density measures the boundary length per area") {
  const Grid g = Grid::unit_square(8, BoundaryMode::box);
  CHECK(g.cell_area() * wall_density(g).sum() == doctest::Approx(4.0));
  const Grid p = Grid::unit_square(8, BoundaryMode::periodic);
  CHECK(wall_density(p).sum() == 0.0);
}

TEST_CASE("conduction matrix is symmetric with constants in its kernel") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.5, 2.0);
  for (BoundaryMode mode : {BoundaryMode::box, BoundaryMode::periodic}) {
    const Grid g(7, 9, 0.1, 0.2, mode);
    const ScalarField k = ScalarField::NullaryExpr(g.cells(), [&] { return U(rng); });
    const SparseMatrix L = conduction_matrix(g, k);
    CHECK((Eigen::MatrixXd(L) - Eigen::MatrixXd(L).transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((L * ScalarField::Ones(g.cells())).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("advected enthalpy is conserved") {
  Setup s(12, BoundaryMode::periodic, 0.3);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.2, 0.8);
  s.theta = ScalarField::NullaryExpr(s.grid.cells(), [&] { return U(rng); });
  s.refresh();
  VectorField v(2, s.grid.cells());
  v.row(0).setConstant(0.3);
  v.row(1).setConstant(-0.2);
  const HeatResult r = s.step(s.no_sources(), {}, 0.02, &v);
  CHECK(std::abs(r.w.sum() - s.w.sum()) <= 1e-12 * s.w.sum());
  for (int c = 0; c < s.grid.cells(); ++c)
    CHECK(enthalpy(s.mat, Matrix2<double>(Matrix2<double>::Identity()), Vector3<double>(s.m.col(c)), r.theta(c)) ==
          doctest::Approx(r.w(c)).epsilon(1e-10));
}

TEST_CASE("adiabatic sources") {
  Setup s(6, BoundaryMode::periodic);
  const Eigen::Index n = s.grid.cells();
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N(0.0, 1.0);
  const MatrixField L = MatrixField::NullaryExpr(4, n, [&] { return N(rng); });
  MatrixField e = L;
  e.row(1) = e.row(2) = 0.5 * (L.row(1) + L.row(2));
  const MagnetizationField r = MagnetizationField::NullaryExpr(3, n, [&] { return N(rng); });
  SUBCASE("no magnetization and no thermal expansion") {
    s.mat.eps1 = 0;
    s.refresh();
    const AdiabaticSources a = adiabatic_sources(s.closures, e, L, s.m, r);
    CHECK(a.from_F.cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.from_m.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("zero temperature") {
    s.m.row(0).setConstant(0.5);
    s.theta.setZero();
    s.refresh();
    const AdiabaticSources a = adiabatic_sources(s.closures, e, L, s.m, r);
    CHECK(a.from_F.cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.from_m.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("spin sign flips only the spin part") {
    s.m.row(0).setConstant(0.5);
    s.m.row(1).setConstant(0.2);
    s.refresh();
    const AdiabaticSources p = adiabatic_sources(s.closures, e, L, s.m, r, SpinSign::plus);
    const AdiabaticSources q = adiabatic_sources(s.closures, e, L, s.m, r, SpinSign::minus);
    const AdiabaticSources z = adiabatic_sources(s.closures, e, L, s.m, MagnetizationField::Zero(3, n));
    CHECK((p.from_F - q.from_F).cwiseAbs().maxCoeff() == 0.0);
    CHECK(((p.from_m + q.from_m) / 2 - adiabatic_sources(s.closures, e, MatrixField::Zero(4, n), s.m, r).from_m)
              .cwiseAbs()
              .maxCoeff() <= 1e-14);
    CHECK(z.from_m.cwiseAbs().maxCoeff() > 0);
  }
  SUBCASE("adiabatic stress is symmetric") {
    s.m.row(0).setConstant(0.5);
    s.refresh();
    for (const auto& c : s.closures) CHECK((c.T_zeta - c.T_zeta.transpose()).norm() <= 1e-12 * std::max(1.0, c.T_zeta.norm()));
  }
}

TEST_CASE("negative enthalpy is reported") {
  Setup s(6, BoundaryMode::periodic);
  HeatSources src = s.no_sources();
  src.xi = ScalarField::Constant(s.grid.cells(), -100.0);
  CHECK_THROWS_AS(s.step(src, {}, 0.1), PositivityError);
}
