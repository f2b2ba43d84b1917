#pragma once

#include "magnetoelast/grid.hpp"

namespace magnetoelast {

// upwind1: first-order upwind fluxes with forward Euler.
// central2_rk2: central face averages with Heun's two-stage method.
enum class AdvectionScheme { upwind1, central2_rk2 };

struct TransportStep {
  double dt = 1e-3;
  AdvectionScheme scheme = AdvectionScheme::upwind1;
  double cfl = 0.4;
};

// Velocity together with its discrete gradient; every stage of a step uses the same pair.
struct Kinematics {
  VectorField v;
  MatrixField L;
};

Kinematics kinematics(const Grid& grid, const VectorField& v);

// Largest dt with dt <= cfl * min(h) / max|v|, capped at dt_max.
double stable_dt(const Grid& grid, const VectorField& v, double cfl, double dt_max);

// Conservative div(q v) built from face fluxes.
template <int C>
Field<C> flux_divergence(const Grid& grid, const VectorField& v, const Field<C>& q,
                         AdvectionScheme scheme);

// Non-conservative (v.grad) q built from the same face velocities; zero on uniform q.
template <int C>
Field<C> advection(const Grid& grid, const VectorField& v, const Field<C>& q,
                   AdvectionScheme scheme);

// Gradient with respect to v of sum_i weight_i . (v.grad q)_i, upwind choices frozen at v.
// Pairing it with v reproduces the advective power exactly.
template <int C>
VectorField advection_power_gradient(const Grid& grid, const VectorField& v, const Field<C>& q,
                                     const Field<C>& weight, AdvectionScheme scheme);

// dq/dt = -div(q v) without any sign check.
ScalarField advance_conserved(const Grid& grid, const ScalarField& q, const VectorField& v,
                              const TransportStep& step);

ScalarField advance_density(const Grid& grid, const ScalarField& rho, const VectorField& v,
                            const TransportStep& step);

struct DefgradUpdate {
  MatrixField F;
  double min_det = 0;
};

// dF/dt = L F - (v.grad) F. Throws DomainError when min det F' <= degeneracy_floor.
DefgradUpdate advance_defgrad(const Grid& grid, const MatrixField& F, const Kinematics& kin,
                              const TransportStep& step, double degeneracy_floor = 0.0);

// dm/dt = skw(L) m - (v.grad) m + r, with r frozen over the step.
MagnetizationField advance_magnetization(const Grid& grid, const MagnetizationField& m,
                                         const Kinematics& kin, const MagnetizationField& r,
                                         const TransportStep& step);

// r = dm/dt + (v.grad) m - skw(L) m.
MagnetizationField corotational_rate(const Grid& grid, const MagnetizationField& m,
                                     const Kinematics& kin, const MagnetizationField& dm_dt,
                                     AdvectionScheme scheme);

// skw(L) m per cell, acting on the in-plane components.
MagnetizationField spin(const MatrixField& L, const MagnetizationField& m);

}  // namespace magnetoelast
