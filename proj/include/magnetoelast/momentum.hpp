#pragma once

#include "magnetoelast/constitutive.hpp"
#include "magnetoelast/grid.hpp"
#include "magnetoelast/transport.hpp"

#include <vector>

namespace magnetoelast {

struct StressBundle {
  MatrixField T;           // conservative stress including the exchange coefficient term
  MatrixField K;           // k grad m (x) grad m, symmetric
  MatrixField S;           // skew stress of the local driving force and the field
  MatrixField S_exchange;  // skew stress of the exchange force (discrete div of the hyperstress)
  MatrixField D;           // nu1 |e|^(p-2) e
  Rank3Field Hs;           // nu2 |grad^2 v|^(p-2) grad^2 v
  Rank3Field Ss;           // k Skw(m (x) grad m), index i + 2j + 4k
  VectorField kelvin;           // mu0 (grad h)^T m
  VectorField zeeman_pressure;  // mu0 grad(h . m)
  VectorField magnetic_force;   // force used by the momentum step, paired with the advection of m

  // Stress whose divergence drives the explicit part of the momentum update.
  MatrixField explicit_stress() const { return T - K + S + S_exchange; }
};

// Closures are evaluated at the current F, m, theta; h is the total field h_ext + h_dem.
StressBundle assemble_stresses(const Grid& grid, const Material& mat,
                               const std::vector<CellClosure>& closures, const VectorField& v,
                               const MagnetizationField& m, const MagnetizationField& h,
                               AdvectionScheme scheme);

struct MomentumInput {
  ScalarField rho;      // density at the new time level
  VectorField v;        // velocity at the old time level
  MatrixField stress;   // explicit stress
  VectorField force;    // explicit body force other than gravity
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  double k_traction = 0;  // tangential traction on box walls, counter-clockwise
  double dt = 1e-3;
  AdvectionScheme scheme = AdvectionScheme::upwind1;
  bool advect = true;     // include -rho (v.grad) v
  // Implicit midpoint: the implicit terms act on (v + v')/2, which makes the kinetic energy
  // change equal to the work done on that velocity. Otherwise backward Euler.
  bool midpoint = true;
  VectorField guess;      // starting iterate for the implicit velocity; empty: v
};

struct MomentumOptions {
  double tol = 1e-10;  // gradient norm relative to the right-hand side
  int max_newton = 60;
  double cg_tol = 1e-13;
};

struct MomentumResult {
  VectorField v;
  VectorField v_mid;                 // velocity the implicit terms and powers are evaluated at
  int newton_iterations = 0;
  std::vector<double> history;       // gradient norms
  ScalarField viscous_dissipation;   // nu1 |e|^p + nu2 |grad^2 v|^p per cell
  MatrixField e;
  Rank3Field G2;
  BoundaryField navier;              // nu_flat |v_t|^p per wall face
  double boundary_dissipation = 0;   // wall integral of nu_flat |v_t|^p
  double power_gravity = 0;
  double power_traction = 0;
  double explicit_power = 0;         // sum of cell area * (div stress + force) . v_mid
  double advection_power = 0;        // - sum of cell area * rho (v.grad v) . v_mid
};

// Implicit in the p-power viscous, hyperviscous and wall friction terms; the minimizer of
// a strictly convex functional found by damped Newton with a line search.
MomentumResult momentum_step(const Grid& grid, const Material& mat, const MomentumInput& in,
                             const MomentumOptions& options = {});

}  // namespace magnetoelast
