#pragma once

#include "magnetoelast/constitutive.hpp"
#include "magnetoelast/grid.hpp"

#include <vector>

namespace magnetoelast {

// tau r + hc Dir(r) - inv_gamma (m x r) contains b.
struct LLGCellProblem {
  double tau = 1.0;
  double hc = 0.0;
  double inv_gamma = 0.0;
  Vector3<double> m = Vector3<double>::Zero();
  Vector3<double> b = Vector3<double>::Zero();
  double tol = 1e-12;
};

// True iff r = 0 solves the inclusion.
bool dir_set_test(const Vector3<double>& b, double hc);

Vector3<double> solve_rate(const LLGCellProblem& problem);

// Distance of b - tau r + inv_gamma (m x r) from hc Dir(r).
double inclusion_residual(const LLGCellProblem& problem, const Vector3<double>& r);

// div(k grad m) in flux form with face coefficients averaged from the cells and no flux
// through box walls.
MagnetizationField exchange_force(const Grid& grid, const ScalarField& k,
                                  const MagnetizationField& m);
MagnetizationField exchange_force(const Grid& grid, const Material& mat, const MatrixField& F,
                                  const MagnetizationField& m);
// 1/2 sum over faces of k_f |grad m|^2 times the cell area.
double exchange_energy(const Grid& grid, const ScalarField& k, const MagnetizationField& m);

struct LLGOptions {
  bool planar = true;  // in-plane magnetization, gyroscopic term dropped
  double tol = 1e-12;
  int max_sweeps = 500;
};

struct LLGResult {
  MagnetizationField m;   // m + dt r
  MagnetizationField r;   // corotational rate
  MagnetizationField b;   // mu0 h - t_local + exchange force at m + dt r
  ScalarField heat;       // mu0 (tau |r|^2 + hc |r|)
  int sweeps = 0;
};

// One implicit step of the Gilbert inclusion. The exchange force is taken at m + dt r with
// face coefficients frozen and solved by nonlinear block Gauss-Seidel sweeps.
// h is the total field h_ext + h_dem; closures are evaluated at the step's F, m, theta.
LLGResult llg_step(const Grid& grid, const Material& mat, const std::vector<CellClosure>& closures,
                   const MagnetizationField& m, const MagnetizationField& h, double dt,
                   const LLGOptions& options = {});

}  // namespace magnetoelast
