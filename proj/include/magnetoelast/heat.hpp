#pragma once

#include "magnetoelast/constitutive.hpp"
#include "magnetoelast/grid.hpp"
#include "magnetoelast/transport.hpp"

#include <vector>

namespace magnetoelast {

// Sign of the spin contribution in the rate paired with zeta_m.
enum class SpinSign { plus, minus };

struct AdiabaticSources {
  ScalarField from_F;  // (zeta_F F^T / det F) : e(v)
  ScalarField from_m;  // (zeta_m / det F) . (r +- skw(grad v) m)
};

AdiabaticSources adiabatic_sources(const std::vector<CellClosure>& closures, const MatrixField& e,
                                   const MatrixField& L, const MagnetizationField& m,
                                   const MagnetizationField& r, SpinSign sign = SpinSign::plus);

struct HeatSources {
  ScalarField xi;             // dissipation rate per cell
  AdiabaticSources adiabatic;
  BoundaryField navier;       // nu_flat |v_t|^p per wall face; half of it enters the body
};

// Boundary exchange h(theta) = kappa_b (theta_ext - theta) per unit wall length.
struct HeatBoundary {
  double kappa_b = 0.0;
  double theta_ext = 0.0;
};

struct HeatOptions {
  double tol = 1e-12;
  int max_newton = 50;
};

struct HeatResult {
  ScalarField w;
  ScalarField theta;
  double exchange_power = 0;  // wall integral of kappa_b (theta_ext - theta'), per unit time
  double navier_power = 0;    // half of the wall Navier dissipation, per unit time
  double source_power = 0;    // integral of xi + adiabatic sources, per unit time
  double adiabatic_power = 0; // integral of the adiabatic sources alone
  int newton_iterations = 0;
};

// Wall length attached to each cell divided by its area (zero in periodic mode).
ScalarField wall_density(const Grid& grid);

// Conductive operator div(k grad theta) in flux form, face coefficient the mean of the cells,
// no flux through box walls.
SparseMatrix conduction_matrix(const Grid& grid, const ScalarField& k);

// Advects w with v_adv, adds the sources, then diffuses implicitly with the conductivity frozen
// in the closures. F and m are the end-of-step values used to recover theta from w.
HeatResult heat_step(const Grid& grid, const Material& mat,
                     const std::vector<CellClosure>& closures, const MatrixField& F,
                     const MagnetizationField& m, const ScalarField& w, const ScalarField& theta,
                     const VectorField& v_adv, const HeatSources& sources,
                     const HeatBoundary& boundary, const TransportStep& step,
                     const HeatOptions& options = {});

}  // namespace magnetoelast
