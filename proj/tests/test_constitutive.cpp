#include "magnetoelast/constitutive.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace magnetoelast;

namespace {

Material plain() {
  Material m;
  return m;
}

Matrix2<double> rot(double a) {
  Matrix2<double> Q;
  Q << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return Q;
}

Vector3<double> rotate(const Matrix2<double>& Q, Vector3<double> m) {
  m.head<2>() = Q * m.head<2>();
  return m;
}

Matrix2<double> random_F(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-0.4, 0.4);
  Matrix2<double> F;
  do {
    F = Matrix2<double>::Identity() + Matrix2<double>::NullaryExpr([&] { return U(rng); });
  } while (F.determinant() < 0.3);
  return F;
}

// Bisection on the monotone map theta -> enthalpy, independent of invert_enthalpy.
double bisect_enthalpy(const Material& mat, const Matrix2<double>& F, const Vector3<double>& m,
                       double w) {
  double lo = 0, hi = 1;
  while (enthalpy(mat, F, m, hi) < w) hi *= 2;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (enthalpy(mat, F, m, mid) < w ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("free energy at the reference state") {
  const Material mat = plain();
  const Matrix2<double> I = Matrix2<double>::Identity();
  const Vector3<double> z = Vector3<double>::Zero();
  const Matrix32<double> gz = Matrix32<double>::Zero();
  CHECK(free_energy(mat, I, z, gz, 1.0) == doctest::Approx(mat.c0).epsilon(1e-15));
  CHECK(free_energy(mat, I, z, gz, 0.0) == doctest::Approx(volumetric(mat, 1.0)));
  CHECK(cauchy_stress(mat, I, z, gz, 0.7).norm() == doctest::Approx(0.0));
}

TEST_CASE("free energy rejects bad input") {
  const Material mat = plain();
  Matrix2<double> F;
  F << 1, 0, 0, -1;
  const Vector3<double> z = Vector3<double>::Zero();
  const Matrix32<double> gz = Matrix32<double>::Zero();
  CHECK_THROWS_AS(free_energy(mat, F, z, gz, 1.0), DomainError);
  CHECK_THROWS_AS(cauchy_stress(mat, F, z, gz, 1.0), DomainError);
  Matrix2<double> nan = Matrix2<double>::Identity();
  nan(0, 1) = std::nan("");
  CHECK_THROWS_AS(free_energy(mat, nan, z, gz, 1.0), DomainError);
  CHECK_THROWS_AS(free_energy(mat, Matrix2<double>(Matrix2<double>::Identity()), z, gz, std::nan("")), DomainError);
}

TEST_CASE("enthalpy inversion") {
  Material mat = plain();
  const Matrix2<double> I = Matrix2<double>::Identity();
  const Vector3<double> z = Vector3<double>::Zero();
  SUBCASE("linear case") {
    mat.eps1 = 0;
    mat.c0 = 2;
    CHECK(invert_enthalpy(mat, I, z, 4.0) == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("zero temperature") {
    CHECK(enthalpy(mat, I, z, 0.0) == 0.0);
    CHECK(invert_enthalpy(mat, I, z, 0.0) == 0.0);
    CHECK(heat_energy(mat, I, Vector3<double>(0.5, 0.2, 0), 0.0) == 0.0);
  }
  SUBCASE("nonlinear case against bisection") {
    mat.eps1 = 0.1;
    const Vector3<double> m(1, 0, 0);
    const double w = enthalpy(mat, I, m, 3.0);
    CHECK(std::abs(invert_enthalpy(mat, I, m, w) - 3.0) <= 1e-10);
    CHECK(std::abs(bisect_enthalpy(mat, I, m, w) - 3.0) <= 1e-10);
  }
  SUBCASE("negative enthalpy is rejected") {
    CHECK_THROWS_AS(invert_enthalpy(mat, I, z, -1e-3), DomainError);
  }
  SUBCASE("round trip on random states") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
      const Matrix2<double> F = random_F(rng);
      const Vector3<double> m(U(rng), U(rng), 0);
      const double w = 5 * U(rng);
      const double th = invert_enthalpy(mat, F, m, w);
      CHECK(std::abs(enthalpy(mat, F, m, th) - w) <= 1e-10 * std::max(w, 1e-300));
    }
  }
}

TEST_CASE("enthalpy is strictly increasing in temperature") {
  const Material mat = plain();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Matrix2<double> F = random_F(rng);
    const Vector3<double> m(U(rng), U(rng), 0);
    const double th = 3 * U(rng) + 1e-3, dth = 1e-4;
    const double slope = (enthalpy(mat, F, m, th + dth) - enthalpy(mat, F, m, th)) / dth;
    CHECK(slope >= mat.c0 / (2 * F.determinant()));
  }
}

TEST_CASE("cut-off plateaus and blend") {
  const double lambda = 0.5;
  Matrix2<double> F;
  F << std::sqrt(0.6), 0, 0, std::sqrt(0.6);  // det 0.6, |F| = sqrt(1.2) < 1/lambda
  CHECK(cutoff_pi(lambda, F) == 1.0);
  F << 2.0, 0.0, 0.0, 0.3;  // det 0.6, |F| about 2.02 > 1/lambda: in the blend
  CHECK(cutoff_pi(lambda, F) < 1.0);
  F << std::sqrt(0.2), 0, 0, std::sqrt(0.2);
  CHECK(cutoff_pi(lambda, F) == 0.0);
  F << std::sqrt(0.375), 0, 0, std::sqrt(0.375);
  CHECK(cutoff_pi(lambda, F) == doctest::Approx(0.5).epsilon(1e-14));
  F << 4.5, 0, 0, 0.5;  // |F| > 2/lambda
  CHECK(cutoff_pi(lambda, F) == 0.0);
}

TEST_CASE("cut-off sandwich") {
  Material mat = plain();
  mat.lambda_cut = 0.2;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int k = 0; k < 500; ++k) {
    Matrix2<double> F = Matrix2<double>::NullaryExpr([&] { return U(rng); });
    const double pi = cutoff_pi(mat, F);
    CHECK(pi >= 0.0);
    CHECK(pi <= 1.0);
    if (F.determinant() > 0) {
      const double dr = det_reg(mat.lambda_cut, F);
      CHECK(dr >= std::min(mat.lambda_cut / 2, F.determinant()) * (1 - 1e-14));
      CHECK(dr > 0);
      CHECK(kappa_reg(mat, mat.lambda_cut, F) > 0);
      CHECK(cond_reg(mat, mat.lambda_cut, F, 0.5) > 0);
    }
  }
}

TEST_CASE("cut-off gradient matches finite differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double lambda = 0.6;
  for (int k = 0; k < 50; ++k) {
    const Matrix2<double> F = Matrix2<double>::Identity() + 0.6 * Matrix2<double>::NullaryExpr([&] { return U(rng); });
    const Matrix2<double> g = cutoff_pi_gradient(lambda, F);
    Matrix2<double> fd;
    const double h = 1e-6;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        Matrix2<double> P = F, M = F;
        P(i, j) += h;
        M(i, j) -= h;
        fd(i, j) = (cutoff_pi(lambda, P) - cutoff_pi(lambda, M)) / (2 * h);
      }
    CHECK((g - fd).norm() <= 1e-6 * std::max(1.0, g.norm()));
  }
}

TEST_CASE("saturation magnetization") {
  CHECK(saturation_magnetization(2, 1, 1, 1) == 0.0);
  CHECK(saturation_magnetization(2, 1, 1, 0.5) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(saturation_magnetization(2, 1, 1, 1.3) == 0.0);
  // numeric minimization of the Landau density over |m| as the oracle
  double best = 0, best_e = 0;
  for (int i = 0; i <= 200000; ++i) {
    const double s = 2.0 * i / 200000;
    const double e = 2 * (0.5 - 1) * s * s + s * s * s * s;
    if (e < best_e) best_e = e, best = s;
  }
  CHECK(std::abs(best - saturation_magnetization(2, 1, 1, 0.5)) <= 1e-5);
  const RigidMagnet rm;
  const Eigen::Vector2d zero = Eigen::Vector2d::Zero();
  for (double dm : {0.1, 0.3}) {
    const Eigen::Vector2d m(dm, 0);
    CHECK(rigid_energy_density(rm, m, 1.2) > rigid_energy_density(rm, zero, 1.2));
  }
}

TEST_CASE("equilibrium magnetization of the full material minimizes the uniform energy") {
  const Material mat = plain();
  const Matrix2<double> I = Matrix2<double>::Identity();
  for (double th : {0.1, 0.5, 0.8}) {
    const double ms = equilibrium_magnetization(mat, th);
    REQUIRE(ms > 0);
    auto e = [&](double s) {
      const Vector3<double> m(s, 0, 0);
      return stored_energy(mat, I, m) + heat_energy(mat, I, m, th);
    };
    CHECK(e(ms) < e(ms * 1.001));
    CHECK(e(ms) < e(ms * 0.999));
    CHECK(std::abs((stored_energy_dm(mat, I, Vector3<double>(ms, 0, 0)) +
                    heat_energy_dm(mat, I, Vector3<double>(ms, 0, 0), th))(0)) <= 1e-12);
  }
  CHECK(equilibrium_magnetization(mat, 1.5) == 0.0);
}

TEST_CASE("dissipation rate") {
  Material mat = plain();
  const Matrix2<double> I = Matrix2<double>::Identity();
  const Vector8<double> G0 = Vector8<double>::Zero();
  const Vector3<double> r0 = Vector3<double>::Zero();
  CHECK(dissipation_rate(mat, I, 0.5, Matrix2<double>::Zero().eval(), G0, r0) == 0.0);
  mat.nu1 = 1;
  mat.p = 4;
  Matrix2<double> e;
  e << 0, 0.5, 0.5, 0;
  CHECK(dissipation_rate(mat, I, 0.5, e, G0, r0) == doctest::Approx(0.25).epsilon(1e-15));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    Matrix2<double> ek = Matrix2<double>::NullaryExpr([&] { return N(rng); });
    ek = 0.5 * (ek + ek.transpose()).eval();
    const Vector8<double> G = Vector8<double>::NullaryExpr([&] { return N(rng); });
    const Vector3<double> r(N(rng), N(rng), N(rng));
    const double xi = dissipation_rate(mat, I, 0.3, ek, G, r);
    const double xe = dissipation_rate_regularized(mat, I, 0.3, ek, G, r, 1e3);
    CHECK(xi >= 0);
    CHECK(xe >= 0);
    CHECK(xe <= xi);
  }
}

TEST_CASE("gradients match finite differences") {
  for (ExchangeScaling scaling : {ExchangeScaling::referential, ExchangeScaling::actual}) {
    Material mat = plain();
    mat.exchange = scaling;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
      const Matrix2<double> F = random_F(rng);
      const Vector3<double> m(U(rng), U(rng), 0.3 * U(rng));
      const double th = 0.2 + std::abs(U(rng));
      const double h = 1e-6;
      Matrix2<double> fF, fZ, fK;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          Matrix2<double> P = F, M = F;
          P(i, j) += h;
          M(i, j) -= h;
          fF(i, j) = (stored_energy(mat, P, m) - stored_energy(mat, M, m)) / (2 * h);
          fZ(i, j) = (heat_energy(mat, P, m, th) - heat_energy(mat, M, m, th)) / (2 * h);
          fK(i, j) = (exchange_coefficient(mat, P) - exchange_coefficient(mat, M)) / (2 * h);
        }
      Vector3<double> fm, fzm;
      for (int i = 0; i < 3; ++i) {
        Vector3<double> p = m, q = m;
        p(i) += h;
        q(i) -= h;
        fm(i) = (stored_energy(mat, F, p) - stored_energy(mat, F, q)) / (2 * h);
        fzm(i) = (heat_energy(mat, F, p, th) - heat_energy(mat, F, q, th)) / (2 * h);
      }
      const double ft = (heat_energy(mat, F, m, th + h) - heat_energy(mat, F, m, th - h)) / (2 * h);
      auto rel = [](const auto& a, const auto& b) { return (a - b).norm() / std::max(b.norm(), 1e-12); };
      CHECK(rel(stored_energy_dF(mat, F, m), fF) <= 1e-5);
      CHECK(rel(heat_energy_dF(mat, F, m, th), fZ) <= 1e-5);
      CHECK(rel(stored_energy_dm(mat, F, m), fm) <= 1e-5);
      CHECK(rel(heat_energy_dm(mat, F, m, th), fzm) <= 1e-5);
      if (scaling == ExchangeScaling::actual) CHECK(rel(exchange_coefficient_gradient(mat, F), fK) <= 1e-5);
      else CHECK(exchange_coefficient_gradient(mat, F).norm() == 0.0);
      CHECK(std::abs(heat_energy_dtheta(mat, F, m, th) - ft) <= 1e-5 * std::abs(ft));
      const double fc = (heat_energy_dtheta(mat, F, m, th + h) - heat_energy_dtheta(mat, F, m, th - h)) / (2 * h);
      CHECK(std::abs(heat_energy_dtheta2(mat, F, m, th) - fc) <= 1e-5 * std::abs(fc));
    }
  }
}

TEST_CASE("frame indifference and stress symmetry") {
  Material mat = plain();
  mat.exchange = ExchangeScaling::actual;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const Matrix2<double> F = random_F(rng);
    const Vector3<double> m(U(rng), U(rng), 0.2 * U(rng));
    const Matrix32<double> gm = Matrix32<double>::NullaryExpr([&] { return U(rng); });
    const double th = 0.1 + 2 * std::abs(U(rng));
    const Matrix2<double> Q = rot(M_PI * U(rng));
    Matrix32<double> gq;
    gq.topRows<2>() = Q * gm.topRows<2>() * Q.transpose();
    gq.row(2) = gm.row(2) * Q.transpose();
    const double psi = free_energy(mat, F, m, gm, th);
    const double psiq = free_energy(mat, Matrix2<double>(Q * F), rotate(Q, m), gq, th);
    CHECK(std::abs(psi - psiq) <= 1e-12 * std::abs(psi));
    CHECK(std::abs(cutoff_pi(mat, F) - cutoff_pi(mat, Matrix2<double>(Q * F))) <= 1e-12);
    const Matrix2<double> T = cauchy_stress(mat, F, m, gm, th);
    CHECK((T - T.transpose()).norm() <= 1e-12 * T.norm());
    // the adiabatic stress alone is symmetric as well
    const Matrix2<double> TZ = heat_energy_dF(mat, F, m, th) * F.transpose();
    CHECK((TZ - TZ.transpose()).norm() <= 1e-12 * std::max(TZ.norm(), 1e-300));
  }
}

TEST_CASE("adiabatic stress vanishes without magnetization or temperature") {
  Material mat = plain();
  mat.eps1 = 0;
  const Matrix2<double> I = Matrix2<double>::Identity();
  CHECK(heat_energy_dF(mat, I, Vector3<double>::Zero().eval(), 0.7).norm() == 0.0);
  CHECK(heat_energy_dm(mat, I, Vector3<double>::Zero().eval(), 0.7).norm() == 0.0);
  const Vector3<double> m(0.4, 0.3, 0);
  CHECK(heat_energy_dF(mat, I, m, 0.0).norm() == 0.0);
  CHECK(heat_energy_dm(mat, I, m, 0.0).norm() == 0.0);
}

TEST_CASE("material validation") {
  Material mat = plain();
  CHECK(validate(mat).empty());
  mat.p = 2;
  const auto problems = validate(mat);
  REQUIRE(!problems.empty());
  CHECK(problems.front().find("p must exceed") != std::string::npos);
}

TEST_CASE("cell closure of the reference state") {
  const Material mat = plain();
  const CellClosure c = cell_closure(mat, Regularization{}, Matrix2<double>::Identity(),
                                     Vector3<double>::Zero(), 0.5);
  CHECK(c.pi == 1.0);
  CHECK(c.J == 1.0);
  CHECK(c.T_phi.norm() == doctest::Approx(0.0));
  CHECK(c.t_phi.norm() == 0.0);
  CHECK(c.hc == doctest::Approx(mat.h0 * 0.5));
  CHECK(c.cond > 0);
}
