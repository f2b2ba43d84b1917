#include "magnetoelast/constitutive.hpp"

#include <sstream>

namespace magnetoelast {

std::vector<std::string> validate(const Material& mat) {
  std::vector<std::string> out;
  auto need = [&out](bool ok, const std::string& msg) {
    if (!ok) out.push_back(msg);
  };
  need(mat.p > 2.0, "p must exceed the dimension d = 2");
  if (mat.p > 2.0) {
    std::ostringstream s;
    s << "s must be at least 2p/(p-2) = " << 2.0 * mat.p / (mat.p - 2.0);
    need(mat.s >= 2.0 * mat.p / (mat.p - 2.0), s.str());
  }
  need(mat.G > 0, "G must be positive");
  need(mat.bulk >= 0, "bulk must be non-negative");
  need(mat.a0 >= kCoefficientFloor, "a0 must be positive");
  need(mat.b0 >= kCoefficientFloor, "b0 must be positive");
  need(mat.c0 > 0, "c0 must be positive");
  need(mat.eps1 >= 0, "eps1 must be non-negative");
  need(mat.eps2 >= 0, "eps2 must be non-negative");
  need(mat.theta_c > 0, "theta_c must be positive");
  need(mat.kappa0 > 0, "kappa0 must be positive");
  need(mat.nu1 > 0, "nu1 must be positive");
  need(mat.nu2 > 0, "nu2 must be positive");
  need(mat.nu_flat > 0, "nu_flat must be positive");
  need(mat.tau > 0, "tau must be positive");
  need(mat.h0 >= 0, "h0 must be non-negative");
  need(mat.g0 >= 0, "g0 must be non-negative");
  need(mat.mu0 > 0, "mu0 must be positive");
  need(mat.cond0 > 0, "cond0 must be positive");
  need(mat.lambda_cut > 0 && mat.lambda_cut <= 1.0 / std::sqrt(2.0),
       "lambda_cut must lie in (0, 1/sqrt(2)] so that F = I is not cut off");
  need(mat.eps_reg >= 0, "eps_reg must be non-negative");
  return out;
}

double equilibrium_magnetization(const Material& mat, double theta) {
  const double level = theta / (1.0 + mat.eps1 * theta);
  const double A = mat.a0 * (curie_level(mat) - level) / (2.0 * mat.b0);
  if (!(A > 0)) return 0.0;
  // q (1 + eps2 q)^2 = A with q = |m|^2, increasing in q
  double lo = 0, hi = A, q = A;
  for (int it = 0; it < 200; ++it) {
    const double d = 1.0 + mat.eps2 * q;
    const double g = q * d * d - A;
    if (g > 0) hi = q; else lo = q;
    double next = q - g / (d * d + 2.0 * mat.eps2 * q * d);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - q) <= 1e-16 * q) return std::sqrt(next);
    q = next;
  }
  return std::sqrt(q);
}

LocalThermoEval evaluate(const Material& mat, const Matrix2<double>& F, const Vector3<double>& m,
                         const Matrix32<double>& grad_m, double theta) {
  LocalThermoEval e;
  const double J = detail::checked_det(F);
  e.phi = stored_energy(mat, F, m);
  e.zeta = heat_energy(mat, F, m, theta);
  e.psi = e.phi + exchange_coefficient(mat, F) * grad_m.squaredNorm() / 2 + e.zeta;
  e.T = cauchy_stress(mat, F, m, grad_m, theta);
  e.t_drv_local = (stored_energy_dm(mat, F, m) + heat_energy_dm(mat, F, m, theta)) / J;
  e.eta = theta != 0 ? entropy(mat, F, m, theta) : 0.0;
  e.c = heat_capacity(mat, F, m, theta);
  e.w = enthalpy(mat, F, m, theta);
  return e;
}

CellClosure cell_closure(const Material& mat, const Regularization& reg, const Matrix2<double>& F,
                         const Vector3<double>& m, double theta) {
  CellClosure c;
  c.J = detail::checked_det(F);
  const Matrix2<double> Ft = F.transpose();
  const double phi = stored_energy(mat, F, m);
  const Matrix2<double> phi_F = stored_energy_dF(mat, F, m);
  const double kappa = exchange_coefficient(mat, F);
  const Matrix2<double> kappa_F = exchange_coefficient_gradient(mat, F);
  Matrix2<double> dpi = Matrix2<double>::Zero();
  if (reg.cutoff) {
    c.pi = cutoff_pi(reg.lambda, F);
    dpi = cutoff_pi_gradient(reg.lambda, F);
  }
  c.phi = c.pi * phi;
  c.T_phi = (c.pi * phi_F + phi * dpi) * Ft / c.J;
  c.t_phi = c.pi * stored_energy_dm(mat, F, m) / c.J;
  const double kreg = c.pi * kappa + (1 - c.pi) * c.J;
  const Matrix2<double> kreg_F = c.pi * kappa_F + (kappa - c.J) * dpi + (1 - c.pi) * cofactor(F);
  c.k = kreg / c.J;
  c.T_kappa = 0.5 * kreg_F * Ft / c.J;
  const double damp_F = c.pi / (1 + reg.eps * std::abs(theta));
  const double damp_m = c.pi / (1 + reg.eps * std::sqrt(std::abs(theta)));
  c.T_zeta = damp_F * heat_energy_dF(mat, F, m, theta) * Ft / c.J;
  c.t_zeta = damp_m * heat_energy_dm(mat, F, m, theta) / c.J;
  const double theta_pos = std::max(theta, 0.0);
  c.hc = coercive_force(mat, F, theta_pos);
  c.inv_gamma = inverse_gyro(mat, F, m, theta_pos);
  c.cond = reg.cutoff ? cond_reg(mat, reg.lambda, F, theta) : conductivity(mat, F, theta);
  return c;
}

}  // namespace magnetoelast
