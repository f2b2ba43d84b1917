#pragma once

#include "magnetoelast/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace magnetoelast {

// kappa(F) = kappa0 (referential) or kappa0 * det F (actual).
enum class ExchangeScaling { referential, actual };

// Neo-Hookean magnet with Landau magnetization energy:
//   v(J) = bulk/2 (J-1)^2, a0(J) = a0 J, b0(J) = b0 J,
//   h_c(F,theta) = h0 max(0, 1 - theta/theta_c), 1/gamma = g0 max(0, 1 - theta/theta_c),
//   cond(F,theta) = cond0.
struct Material {
  double G = 1.0;
  double bulk = 1.0;
  double a0 = 1.0;
  double b0 = 1.0;
  double c0 = 1.0;
  double eps1 = 0.1;
  double eps2 = 0.1;
  double theta_c = 1.0;
  double kappa0 = 1e-3;
  ExchangeScaling exchange = ExchangeScaling::referential;
  double nu1 = 1e-2;
  double nu2 = 1e-7;
  double nu_flat = 1e-2;
  double tau = 1.0;
  double h0 = 0.05;
  double g0 = 0.0;
  double mu0 = 1.0;
  double cond0 = 1e-2;
  double p = 4.0;
  double s = 4.0;
  double lambda_cut = 0.1;
  double eps_reg = 0.0;
};

// Lower bound delta used when validating a0, b0 >= delta J.
inline constexpr double kCoefficientFloor = 1e-12;

std::vector<std::string> validate(const Material& mat);

// Safeguards applied inside the solvers.
struct Regularization {
  bool cutoff = true;
  double lambda = 0.1;
  double eps = 0.0;
};

namespace detail {

template <typename Scalar>
void require_finite(const Matrix2<Scalar>& F) {
  if (!F.allFinite()) throw DomainError("non-finite deformation gradient");
}

template <typename Scalar>
Scalar checked_det(const Matrix2<Scalar>& F) {
  require_finite(F);
  const Scalar J = F.determinant();
  if (!(J > Scalar(0))) throw DomainError("det F must be positive");
  return J;
}

}  // namespace detail

template <typename Scalar>
Matrix2<Scalar> cofactor(const Matrix2<Scalar>& F) {
  Matrix2<Scalar> C;
  C << F(1, 1), -F(1, 0), -F(0, 1), F(0, 0);
  return C;
}

template <typename Scalar>
Scalar volumetric(const Material& mat, Scalar J) {
  return Scalar(0.5 * mat.bulk) * (J - 1) * (J - 1);
}

template <typename Scalar>
Scalar volumetric_prime(const Material& mat, Scalar J) {
  return Scalar(mat.bulk) * (J - 1);
}

// |m|^2 / (1 + eps2 |m|^2) and its gradient.
template <typename Scalar>
Scalar saturating_square(const Material& mat, const Vector3<Scalar>& m) {
  const Scalar m2 = m.squaredNorm();
  return m2 / (1 + Scalar(mat.eps2) * m2);
}

template <typename Scalar>
Vector3<Scalar> saturating_square_gradient(const Material& mat, const Vector3<Scalar>& m) {
  const Scalar den = 1 + Scalar(mat.eps2) * m.squaredNorm();
  return Scalar(2) * m / (den * den);
}

// theta/(1 + eps1 theta) at theta_c.
inline double curie_level(const Material& mat) {
  return mat.theta_c / (1.0 + mat.eps1 * mat.theta_c);
}

template <typename Scalar>
Scalar exchange_coefficient(const Material& mat, const Matrix2<Scalar>& F) {
  if (mat.exchange == ExchangeScaling::actual) return Scalar(mat.kappa0) * F.determinant();
  return Scalar(mat.kappa0);
}

template <typename Scalar>
Matrix2<Scalar> exchange_coefficient_gradient(const Material& mat, const Matrix2<Scalar>& F) {
  if (mat.exchange == ExchangeScaling::actual) return Scalar(mat.kappa0) * cofactor(F);
  return Matrix2<Scalar>::Zero();
}

// Stored energy phi(F, m): elastic part plus the temperature independent magnetic part.
template <typename Scalar>
Scalar stored_energy(const Material& mat, const Matrix2<Scalar>& F, const Vector3<Scalar>& m) {
  const Scalar J = detail::checked_det(F);
  const Scalar elastic = Scalar(0.5 * mat.G) * (F.squaredNorm() / J - 2) + volumetric(mat, J);
  const Scalar m2 = m.squaredNorm();
  return elastic - Scalar(mat.a0 * curie_level(mat)) * J * saturating_square(mat, m) +
         Scalar(mat.b0) * J * m2 * m2;
}

template <typename Scalar>
Matrix2<Scalar> stored_energy_dF(const Material& mat, const Matrix2<Scalar>& F,
                                 const Vector3<Scalar>& m) {
  const Scalar J = detail::checked_det(F);
  const Matrix2<Scalar> cof = cofactor(F);
  const Scalar m2 = m.squaredNorm();
  const Scalar dJ = -Scalar(0.5 * mat.G) * F.squaredNorm() / (J * J) + volumetric_prime(mat, J) -
                    Scalar(mat.a0 * curie_level(mat)) * saturating_square(mat, m) +
                    Scalar(mat.b0) * m2 * m2;
  return Scalar(mat.G) * F / J + dJ * cof;
}

template <typename Scalar>
Vector3<Scalar> stored_energy_dm(const Material& mat, const Matrix2<Scalar>& F,
                                 const Vector3<Scalar>& m) {
  const Scalar J = detail::checked_det(F);
  return -Scalar(mat.a0 * curie_level(mat)) * J * saturating_square_gradient(mat, m) +
         Scalar(4 * mat.b0) * J * m.squaredNorm() * m;
}

// Heat part zeta(F, m, theta). For theta < 0 the odd extension c0 theta (1 - ln|theta|)
// without magnetic coupling is used; it requires eps_reg > 0.
template <typename Scalar>
Scalar heat_energy(const Material& mat, const Matrix2<Scalar>& F, const Vector3<Scalar>& m,
                   Scalar theta) {
  using std::log;
  const Scalar J = detail::checked_det(F);
  if (!std::isfinite(static_cast<double>(theta))) throw DomainError("non-finite temperature");
  if (theta == Scalar(0)) return Scalar(0);
  if (theta < Scalar(0)) {
    if (!(mat.eps_reg > 0)) throw DomainError("negative temperature");
    return Scalar(mat.c0) * theta * (1 - log(-theta));
  }
  const Scalar level = theta / (1 + Scalar(mat.eps1) * theta);
  return Scalar(mat.a0) * J * level * saturating_square(mat, m) +
         Scalar(mat.c0) * theta * (1 - log(theta));
}

template <typename Scalar>
Matrix2<Scalar> heat_energy_dF(const Material& mat, const Matrix2<Scalar>& F,
                               const Vector3<Scalar>& m, Scalar theta) {
  detail::checked_det(F);
  if (!(theta > Scalar(0))) return Matrix2<Scalar>::Zero();
  const Scalar level = theta / (1 + Scalar(mat.eps1) * theta);
  return Scalar(mat.a0) * level * saturating_square(mat, m) * cofactor(F);
}

template <typename Scalar>
Vector3<Scalar> heat_energy_dm(const Material& mat, const Matrix2<Scalar>& F,
                               const Vector3<Scalar>& m, Scalar theta) {
  const Scalar J = detail::checked_det(F);
  if (!(theta > Scalar(0))) return Vector3<Scalar>::Zero();
  const Scalar level = theta / (1 + Scalar(mat.eps1) * theta);
  return Scalar(mat.a0) * J * level * saturating_square_gradient(mat, m);
}

template <typename Scalar>
Scalar heat_energy_dtheta(const Material& mat, const Matrix2<Scalar>& F,
                          const Vector3<Scalar>& m, Scalar theta) {
  using std::log;
  const Scalar J = detail::checked_det(F);
  if (theta < Scalar(0)) return -Scalar(mat.c0) * log(-theta);
  if (!(theta > Scalar(0))) throw DomainError("entropy undefined at zero temperature");
  const Scalar den = 1 + Scalar(mat.eps1) * theta;
  return Scalar(mat.a0) * J * saturating_square(mat, m) / (den * den) - Scalar(mat.c0) * log(theta);
}

template <typename Scalar>
Scalar heat_energy_dtheta2(const Material& mat, const Matrix2<Scalar>& F,
                           const Vector3<Scalar>& m, Scalar theta) {
  const Scalar J = detail::checked_det(F);
  if (theta < Scalar(0)) return -Scalar(mat.c0) / theta;
  const Scalar den = 1 + Scalar(mat.eps1) * theta;
  return -Scalar(2 * mat.eps1 * mat.a0) * J * saturating_square(mat, m) / (den * den * den) -
         Scalar(mat.c0) / theta;
}

template <typename Scalar>
Scalar free_energy(const Material& mat, const Matrix2<Scalar>& F, const Vector3<Scalar>& m,
                   const Matrix32<Scalar>& grad_m, Scalar theta) {
  if (!m.allFinite() || !grad_m.allFinite()) throw DomainError("non-finite magnetization");
  return stored_energy(mat, F, m) + exchange_coefficient(mat, F) * grad_m.squaredNorm() / 2 +
         heat_energy(mat, F, m, theta);
}

template <typename Scalar>
Matrix2<Scalar> cauchy_stress(const Material& mat, const Matrix2<Scalar>& F,
                              const Vector3<Scalar>& m, const Matrix32<Scalar>& grad_m,
                              Scalar theta) {
  const Scalar J = detail::checked_det(F);
  const Matrix2<Scalar> P = stored_energy_dF(mat, F, m) + heat_energy_dF(mat, F, m, theta) +
                            Scalar(0.5) * grad_m.squaredNorm() * exchange_coefficient_gradient(mat, F);
  return P * F.transpose() / J;
}

// Heat part of the internal energy per actual volume, w = (zeta - theta zeta_theta)/det F.
template <typename Scalar>
Scalar enthalpy(const Material& mat, const Matrix2<Scalar>& F, const Vector3<Scalar>& m,
                Scalar theta) {
  const Scalar J = detail::checked_det(F);
  if (theta == Scalar(0)) return Scalar(0);
  if (theta < Scalar(0)) {
    if (!(mat.eps_reg > 0)) throw DomainError("negative temperature");
    return Scalar(mat.c0) * theta / J;
  }
  const Scalar den = 1 + Scalar(mat.eps1) * theta;
  return (Scalar(mat.c0) * theta +
          Scalar(mat.eps1 * mat.a0) * J * theta * theta * saturating_square(mat, m) / (den * den)) /
         J;
}

// Actual heat capacity c = d enthalpy / d theta.
template <typename Scalar>
Scalar heat_capacity(const Material& mat, const Matrix2<Scalar>& F, const Vector3<Scalar>& m,
                     Scalar theta) {
  const Scalar J = detail::checked_det(F);
  if (theta <= Scalar(0)) return Scalar(mat.c0) / J;
  const Scalar den = 1 + Scalar(mat.eps1) * theta;
  return (Scalar(mat.c0) +
          Scalar(2 * mat.eps1 * mat.a0) * J * theta * saturating_square(mat, m) / (den * den * den)) /
         J;
}

// Actual entropy eta = -zeta_theta / det F.
template <typename Scalar>
Scalar entropy(const Material& mat, const Matrix2<Scalar>& F, const Vector3<Scalar>& m,
               Scalar theta) {
  return -heat_energy_dtheta(mat, F, m, theta) / F.determinant();
}

template <typename Scalar>
Scalar invert_enthalpy(const Material& mat, const Matrix2<Scalar>& F, const Vector3<Scalar>& m,
                       Scalar w) {
  using std::abs;
  const Scalar J = detail::checked_det(F);
  if (!std::isfinite(static_cast<double>(w))) throw DomainError("non-finite enthalpy");
  if (w < Scalar(0)) {
    if (!(mat.eps_reg > 0)) throw DomainError("negative enthalpy");
    return w * J / Scalar(mat.c0);
  }
  if (w == Scalar(0)) return Scalar(0);
  const Scalar A = Scalar(mat.eps1 * mat.a0) * J * saturating_square(mat, m);
  const Scalar target = w * J;
  const Scalar c0 = Scalar(mat.c0);
  if (mat.eps1 == 0 || A == Scalar(0)) return target / c0;
  // g(theta) = c0 theta + A theta^2/(1+eps1 theta)^2 - w J is increasing; root in [0, wJ/c0].
  Scalar lo = 0, hi = target / c0;
  Scalar theta = hi;
  const Scalar eps1 = Scalar(mat.eps1);
  for (int it = 0; it < 200; ++it) {
    const Scalar den = 1 + eps1 * theta;
    const Scalar g = c0 * theta + A * theta * theta / (den * den) - target;
    if (g > Scalar(0)) hi = theta; else lo = theta;
    const Scalar dg = c0 + Scalar(2) * A * theta / (den * den * den);
    Scalar next = theta - g / dg;
    if (!(next > lo && next < hi)) next = Scalar(0.5) * (lo + hi);
    if (abs(next - theta) <= std::numeric_limits<Scalar>::epsilon() * 4 * abs(theta) ||
        hi - lo <= std::numeric_limits<Scalar>::epsilon() * 4 * hi) {
      return next;
    }
    theta = next;
  }
  return theta;
}

// C1 smoothstep S(x) = 3x^2 - 2x^3 on [0,1], constant outside.
template <typename Scalar>
Scalar smoothstep(Scalar x) {
  x = std::clamp(x, Scalar(0), Scalar(1));
  return x * x * (3 - 2 * x);
}

template <typename Scalar>
Scalar smoothstep_prime(Scalar x) {
  if (x <= Scalar(0) || x >= Scalar(1)) return Scalar(0);
  return 6 * x * (1 - x);
}

template <typename Scalar>
Scalar cutoff_pi(Scalar lambda, const Matrix2<Scalar>& F) {
  const Scalar J = F.determinant();
  const Scalar x1 = (2 * J - lambda) / lambda;
  const Scalar x2 = 2 - lambda * F.norm();
  return smoothstep(x1) * smoothstep(x2);
}

template <typename Scalar>
Scalar cutoff_pi(const Material& mat, const Matrix2<Scalar>& F) {
  return cutoff_pi(Scalar(mat.lambda_cut), F);
}

template <typename Scalar>
Matrix2<Scalar> cutoff_pi_gradient(Scalar lambda, const Matrix2<Scalar>& F) {
  const Scalar J = F.determinant();
  const Scalar normF = F.norm();
  const Scalar x1 = (2 * J - lambda) / lambda;
  const Scalar x2 = 2 - lambda * normF;
  Matrix2<Scalar> g = smoothstep_prime(x1) * smoothstep(x2) * (2 / lambda) * cofactor(F);
  if (normF > Scalar(0)) g -= smoothstep(x1) * smoothstep_prime(x2) * lambda * F / normF;
  return g;
}

template <typename Scalar>
Scalar det_reg(Scalar lambda, const Matrix2<Scalar>& F) {
  const Scalar pi = cutoff_pi(lambda, F);
  return pi * F.determinant() + 1 - pi;
}

template <typename Scalar>
Scalar kappa_reg(const Material& mat, Scalar lambda, const Matrix2<Scalar>& F) {
  const Scalar pi = cutoff_pi(lambda, F);
  return pi * exchange_coefficient(mat, F) + (1 - pi) * F.determinant();
}

template <typename Scalar>
Scalar conductivity(const Material& mat, const Matrix2<Scalar>&, Scalar) {
  return Scalar(mat.cond0);
}

template <typename Scalar>
Scalar cond_reg(const Material& mat, Scalar lambda, const Matrix2<Scalar>& F, Scalar theta) {
  const Scalar pi = cutoff_pi(lambda, F);
  return pi * conductivity(mat, F, theta) + 1 - pi;
}

template <typename Scalar>
Scalar coercive_force(const Material& mat, const Matrix2<Scalar>&, Scalar theta) {
  return Scalar(mat.h0) * std::max(Scalar(0), 1 - theta / Scalar(mat.theta_c));
}

template <typename Scalar>
Scalar inverse_gyro(const Material& mat, const Matrix2<Scalar>&, const Vector3<Scalar>&,
                    Scalar theta) {
  return Scalar(mat.g0) * std::max(Scalar(0), 1 - theta / Scalar(mat.theta_c));
}

inline double saturation_magnetization(double a0c, double b0c, double theta_c, double theta) {
  if (theta >= theta_c) return 0.0;
  return std::sqrt(a0c * (theta_c - theta) / (2.0 * b0c));
}

// Magnitude of the uniform minimizer of phi + zeta over m at F = I; zero at or above theta_c.
double equilibrium_magnetization(const Material& mat, double theta);

template <typename Scalar>
Scalar dissipation_rate(const Material& mat, const Matrix2<Scalar>& F, Scalar theta,
                        const Matrix2<Scalar>& e, const Vector8<Scalar>& G2,
                        const Vector3<Scalar>& r) {
  using std::pow;
  const Scalar hp = Scalar(mat.p) / 2;
  return Scalar(mat.nu1) * pow(e.squaredNorm(), hp) + Scalar(mat.nu2) * pow(G2.squaredNorm(), hp) +
         Scalar(mat.mu0 * mat.tau) * r.squaredNorm() +
         Scalar(mat.mu0) * coercive_force(mat, F, theta) * r.norm();
}

template <typename Scalar>
Scalar dissipation_rate_regularized(const Material& mat, const Matrix2<Scalar>& F, Scalar theta,
                                   const Matrix2<Scalar>& e, const Vector8<Scalar>& G2,
                                   const Vector3<Scalar>& r, Scalar eps) {
  using std::pow;
  const Scalar hp = Scalar(mat.p) / 2;
  const Scalar den = 1 + eps * pow(e.squaredNorm(), hp) + eps * pow(G2.squaredNorm(), hp) +
                     eps * r.squaredNorm();
  return dissipation_rate(mat, F, theta, e, G2, r) / den;
}

struct LocalThermoEval {
  double psi = 0;
  double phi = 0;
  double zeta = 0;
  Matrix2<double> T = Matrix2<double>::Zero();
  Vector3<double> t_drv_local = Vector3<double>::Zero();
  double eta = 0;
  double c = 0;
  double w = 0;
};

LocalThermoEval evaluate(const Material& mat, const Matrix2<double>& F, const Vector3<double>& m,
                         const Matrix32<double>& grad_m, double theta);

// Cell closures as seen by the solvers, with the cut-off and eps safeguards applied.
struct CellClosure {
  double pi = 1;            // cut-off value
  double J = 1;             // det F
  double phi = 0;           // stored energy (cut-off weighted)
  double k = 0;             // exchange coefficient over det F
  Matrix2<double> T_phi = Matrix2<double>::Zero();   // phi_F F^T / J
  Matrix2<double> T_zeta = Matrix2<double>::Zero();  // zeta_F F^T / J (adiabatic stress)
  Matrix2<double> T_kappa = Matrix2<double>::Zero(); // kappa'(F) F^T / (2J), multiplies |grad m|^2
  Vector3<double> t_phi = Vector3<double>::Zero();   // phi_m / J
  Vector3<double> t_zeta = Vector3<double>::Zero();  // zeta_m / J
  double hc = 0;
  double inv_gamma = 0;
  double cond = 0;
};

CellClosure cell_closure(const Material& mat, const Regularization& reg, const Matrix2<double>& F,
                         const Vector3<double>& m, double theta);

// Rigid magnet used by the statics module and the hysteresis oracle:
//   psi(m, theta) = a0 (theta - theta_c)|m|^2 + b0 |m|^4 + c0 theta (1 - ln theta).
struct RigidMagnet {
  double a0 = 1.0;
  double b0 = 1.0;
  double c0 = 1.0;
  double theta_c = 1.0;
  double kappa = 1e-3;
  double mu0 = 1.0;
};

template <typename Scalar, int D>
Scalar rigid_energy_density(const RigidMagnet& rm, const Eigen::Matrix<Scalar, D, 1>& m,
                            Scalar theta) {
  using std::log;
  const Scalar m2 = m.squaredNorm();
  const Scalar thermal = theta > Scalar(0) ? Scalar(rm.c0) * theta * (1 - log(theta)) : Scalar(0);
  return Scalar(rm.a0) * (theta - Scalar(rm.theta_c)) * m2 + Scalar(rm.b0) * m2 * m2 + thermal;
}

template <typename Scalar, int D>
Eigen::Matrix<Scalar, D, 1> rigid_driving_force(const RigidMagnet& rm,
                                                const Eigen::Matrix<Scalar, D, 1>& m, Scalar theta) {
  return (Scalar(2 * rm.a0) * (theta - Scalar(rm.theta_c)) + Scalar(4 * rm.b0) * m.squaredNorm()) * m;
}

}  // namespace magnetoelast
