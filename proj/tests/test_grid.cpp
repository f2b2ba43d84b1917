#include "magnetoelast/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

using namespace magnetoelast;

namespace {

ScalarField sample(const Grid& g, const std::function<double(double, double)>& f) {
  ScalarField out(g.cells());
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) out(g.index(i, j)) = f(g.x(i), g.y(j));
  return out;
}

bool interior(const Grid& g, int c, int margin) {
  const int i = c % g.nx(), j = c / g.nx();
  return i >= margin && j >= margin && i < g.nx() - margin && j < g.ny() - margin;
}

}  // namespace

TEST_CASE("gradient of an affine field is exact in the interior") {
  const Grid g = Grid::unit_square(16, BoundaryMode::box);
  const ScalarField f = sample(g, [](double x, double y) { return 2 * x - 3 * y + 1; });
  const VectorField gr = grad(g, f);
  for (int c = 0; c < g.cells(); ++c)
    if (interior(g, c, 1)) {
      CHECK(gr(0, c) == doctest::Approx(2.0).epsilon(1e-12));
      CHECK(gr(1, c) == doctest::Approx(-3.0).epsilon(1e-12));
    }
}

TEST_CASE("symmetric and skew gradient of a simple shear") {
  const Grid g = Grid::unit_square(16, BoundaryMode::box);
  VectorField v = VectorField::Zero(2, g.cells());
  v.row(0) = sample(g, [](double, double y) { return y; }).transpose();
  const MatrixField e = sym_grad(g, v), w = skw_grad(g, v);
  for (int c = 0; c < g.cells(); ++c)
    if (interior(g, c, 1)) {
      // column-major 00, 10, 01, 11
      CHECK(std::abs(e(0, c)) <= 1e-12);
      CHECK(e(1, c) == doctest::Approx(0.5));
      CHECK(e(2, c) == doctest::Approx(0.5));
      CHECK(std::abs(e(3, c)) <= 1e-12);
      CHECK(w(2, c) == doctest::Approx(0.5));
      CHECK(w(1, c) == doctest::Approx(-0.5));
    }
}

TEST_CASE("operators converge at second order on smooth periodic data") {
  auto error = [](int n) {
    const Grid g = Grid::unit_square(n, BoundaryMode::periodic);
    const double k = 2 * M_PI;
    const ScalarField f = sample(g, [&](double x, double y) { return std::sin(k * x) * std::cos(k * y); });
    const ScalarField fx = sample(g, [&](double x, double y) { return k * std::cos(k * x) * std::cos(k * y); });
    const ScalarField lap = sample(g, [&](double x, double y) { return -2 * k * k * std::sin(k * x) * std::cos(k * y); });
    VectorField v(2, g.cells());
    v.row(0) = f.transpose();
    v.row(1) = f.transpose();
    const ScalarField dv = sample(g, [&](double x, double y) {
      return k * std::cos(k * x) * std::cos(k * y) - k * std::sin(k * x) * std::sin(k * y);
    });
    return std::array<double, 3>{(grad(g, f).row(0).transpose() - fx).cwiseAbs().maxCoeff(),
                                 (laplacian(g, f) - lap).cwiseAbs().maxCoeff(),
                                 (div(g, v) - dv).cwiseAbs().maxCoeff()};
  };
  const auto a = error(32), b = error(64);
  for (int q = 0; q < 3; ++q) CHECK(a[q] / b[q] >= 3.5);
}

TEST_CASE("second gradient of a quadratic field") {
  const Grid g = Grid::unit_square(16, BoundaryMode::box);
  VectorField v = VectorField::Zero(2, g.cells());
  v.row(0) = sample(g, [](double x, double y) { return x * y; }).transpose();
  v.row(1) = sample(g, [](double x, double) { return x * x; }).transpose();
  const Rank3Field h = second_grad(g, v);
  for (int c = 0; c < g.cells(); ++c)
    if (interior(g, c, 2)) {
      // index i + 2j + 4k: d^2 v_i / dx_j dx_k
      CHECK(h(0 + 2 * 0 + 4 * 1, c) == doctest::Approx(1.0));
      CHECK(h(0 + 2 * 1 + 4 * 0, c) == doctest::Approx(1.0));
      CHECK(h(1 + 0 + 0, c) == doctest::Approx(2.0));
      CHECK(std::abs(h(0, c)) <= 1e-9);
    }
}

TEST_CASE("boundary integrals") {
  const Grid g = Grid::unit_square(20, BoundaryMode::box);
  const ScalarField one = ScalarField::Ones(g.cells());
  CHECK(boundary_integral(g, boundary_trace(g, one)) == doctest::Approx(4.0).epsilon(1e-12));
  const ScalarField x = sample(g, [](double x, double) { return x; });
  CHECK(boundary_integral(g, boundary_trace(g, x)) == doctest::Approx(2.0).epsilon(1e-12));
  const BoundaryField t = boundary_trace(g, ScalarField::Constant(g.cells(), 0.7));
  const BoundaryField s = surface_divergence(g, t);
  for (const auto* side : {&s.bottom, &s.right, &s.top, &s.left}) CHECK(side->cwiseAbs().maxCoeff() <= 1e-12);
  const Grid p = Grid::unit_square(8, BoundaryMode::periodic);
  CHECK_THROWS_AS(boundary_trace(p, ScalarField::Ones(p.cells()).eval()), UnsupportedOperation);
}

TEST_CASE("summation by parts") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> N(0.0, 1.0);
  for (BoundaryMode mode : {BoundaryMode::periodic, BoundaryMode::box}) {
    const Grid g(12, 10, 0.1, 0.13, mode);
    const ScalarField f = ScalarField::NullaryExpr(g.cells(), [&] { return N(rng); });
    const VectorField v = VectorField::NullaryExpr(2, g.cells(), [&] { return N(rng); });
    const double lhs = inner(g, grad(g, f), v) + inner(g, f, div(g, v));
    const double rhs = mode == BoundaryMode::periodic
                           ? 0.0
                           : boundary_pairing(g, f, kNeumann, v, velocity_closure(0), velocity_closure(1));
    CHECK(std::abs(lhs - rhs) <= 1e-10);
  }
}

TEST_CASE("operators are linear") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> N(0.0, 1.0);
  const Grid g = Grid::unit_square(10, BoundaryMode::box);
  const VectorField a = VectorField::NullaryExpr(2, g.cells(), [&] { return N(rng); });
  const VectorField b = VectorField::NullaryExpr(2, g.cells(), [&] { return N(rng); });
  const VectorField mix = 2.5 * a - 0.75 * b;
  CHECK((sym_grad(g, mix) - (2.5 * sym_grad(g, a) - 0.75 * sym_grad(g, b))).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((second_grad(g, mix) - (2.5 * second_grad(g, a) - 0.75 * second_grad(g, b))).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((div(g, mix) - (2.5 * div(g, a) - 0.75 * div(g, b))).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("sparse gradient matrices agree with the field operators") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> N(0.0, 1.0);
  for (BoundaryMode mode : {BoundaryMode::periodic, BoundaryMode::box}) {
    const Grid g = Grid::unit_square(9, mode);
    const VectorField v = VectorField::NullaryExpr(2, g.cells(), [&] { return N(rng); });
    const MatrixField L = unblocked<4>(g.velocity_gradient_matrix() * blocked<2>(v));
    CHECK((L - velocity_gradient(g, v)).cwiseAbs().maxCoeff() <= 1e-12);
    const Rank3Field H = unblocked<8>(g.velocity_second_gradient_matrix() * blocked<2>(v));
    CHECK((H - second_grad(g, v)).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("grid dumps round trip") {
  const Grid g(5, 4, 0.2, 0.25, BoundaryMode::box);
  Eigen::MatrixXd data = Eigen::MatrixXd::Random(3, g.cells());
  const std::string path = "grid_dump_roundtrip.bin";
  write_dump(path, "m", g, data);
  const GridDump d = read_dump(path);
  std::remove(path.c_str());
  CHECK(d.name == "m");
  CHECK(d.nx == 5);
  CHECK(d.ny == 4);
  CHECK(d.hy == 0.25);
  CHECK(d.data == data);
}
