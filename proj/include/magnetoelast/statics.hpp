#pragma once

#include "magnetoelast/constitutive.hpp"
#include "magnetoelast/demag.hpp"
#include "magnetoelast/grid.hpp"

#include <optional>
#include <string>
#include <vector>

namespace magnetoelast {

struct StaticsOptions {
  double tol = 1e-8;        // max-norm of the first-order residual
  double step_tol = 1e-10;  // max-norm of the last update
  int max_iter = 100000;
  bool demag = false;
  int pad = 4;
};

struct StaticsResult {
  MagnetizationField m;
  double energy = 0;
  double residual = 0;
  int iterations = 0;
  std::vector<double> energies;  // accepted iterates, without the m-independent thermal term
};

// Reduced magnetostatic energy: integral of psi(m, theta) + kappa |grad m|^2/2 - mu0 h_ext.m
// plus mu0/2 integral |grad u_m|^2 when demag is on.
double magnetostatic_energy(const RigidMagnet& rm, const Grid& grid, double theta,
                            const Vector3<double>& h_ext, const MagnetizationField& m,
                            const DemagSolver* demag);

// Pointwise first-order residual psi_m - div(kappa grad m) - mu0 h_ext + mu0 grad u.
MagnetizationField magnetostatic_residual(const RigidMagnet& rm, const Grid& grid, double theta,
                                          const Vector3<double>& h_ext,
                                          const MagnetizationField& m, const DemagSolver* demag);

// Barzilai-Borwein gradient descent with monotone Armijo backtracking. m0 must not vanish
// identically (m = 0 is a critical point for h_ext = 0).
StaticsResult minimize_magnetostatic(const RigidMagnet& rm, const Grid& grid, double theta,
                                     const Vector3<double>& h_ext, const MagnetizationField& m0,
                                     const StaticsOptions& options = {});

struct CurvePoint {
  double theta = 0;
  double m_norm = 0;  // mean |m| over the cells
  double energy = 0;
  double residual = 0;
};

// Thetas must ascend; each minimization is warm-started from the previous one.
std::vector<CurvePoint> transition_curve(const RigidMagnet& rm, const Grid& grid,
                                         const std::vector<double>& thetas,
                                         const Vector3<double>& h_ext,
                                         const StaticsOptions& options = {},
                                         std::optional<MagnetizationField> seed = std::nullopt);

void write_curve_csv(const std::string& path, const std::vector<CurvePoint>& curve);

}  // namespace magnetoelast
