#pragma once

#include "magnetoelast/constitutive.hpp"
#include "magnetoelast/demag.hpp"
#include "magnetoelast/grid.hpp"

#include <array>
#include <string>
#include <vector>

namespace magnetoelast {

// Energies of one state.
struct EnergySnapshot {
  double kinetic = 0;
  double stored = 0;
  double exchange = 0;
  double zeeman = 0;
  double demag = 0;
  double heat = 0;
  double entropy = 0;
  double total_mass = 0;
  double min_theta = 0;
  double min_detF = 0;

  double mechanical() const { return kinetic + stored + exchange + zeeman + demag; }
  double total() const { return mechanical() + heat; }
  double scale() const;
};

struct SnapshotInput {
  const ScalarField* rho = nullptr;
  const VectorField* v = nullptr;
  const MatrixField* F = nullptr;
  const MagnetizationField* m = nullptr;
  const ScalarField* w = nullptr;
  const ScalarField* theta = nullptr;
  const std::vector<CellClosure>* closures = nullptr;  // at (F, m); supplies phi and k
  const MagnetizationField* h_ext = nullptr;
  const DemagSolution* demag = nullptr;  // may be null when demag is off
};

EnergySnapshot measure(const Grid& grid, const Material& mat, const SnapshotInput& in);

// Rates over one step; every entry is a per-unit-time integral over the domain or its walls.
struct StepFluxes {
  double dt = 0;
  double dissipation_bulk = 0;      // integral of xi
  double dissipation_boundary = 0;  // wall integral of nu_flat |v_t|^p
  double power_gravity = 0;
  double power_external_field = 0;
  double power_traction = 0;
  double power_boundary_heat = 0;   // boundary exchange plus the Navier half that enters
  double adiabatic_bulk = 0;
  double entropy_production = 0;
  bool cutoff_active = false;
};

// Column order of the report CSV follows the member order.
struct EnergyReport {
  double step = 0;
  double time = 0;
  double kinetic = 0;
  double stored = 0;
  double exchange = 0;
  double zeeman = 0;
  double demag = 0;
  double heat = 0;
  double dissipation_bulk = 0;
  double dissipation_boundary = 0;
  double power_gravity = 0;
  double power_external_field = 0;
  double power_traction = 0;
  double power_boundary_heat = 0;
  double adiabatic_bulk = 0;
  double residual_mech = 0;
  double residual_total = 0;
  double min_theta = 0;
  double min_detF = 0;
  double total_mass = 0;
  double entropy_production = 0;
  double entropy = 0;
  double energy_scale = 0;
  double cutoff_active = 0;

  static const std::array<const char*, 24>& columns();
  static const std::array<double EnergyReport::*, 24>& members();
};

// Accumulates the time-integrated balances from the first snapshot on.
class Auditor {
 public:
  explicit Auditor(const EnergySnapshot& initial, double time = 0);
  EnergyReport audit(const EnergySnapshot& after, const StepFluxes& fluxes);
  const EnergyReport& initial_report() const { return initial_; }

 private:
  EnergySnapshot start_;
  EnergyReport initial_;
  double time_;
  long step_ = 0;
  double scale_;
  double int_dissipation_ = 0;   // bulk and boundary
  double int_boundary_dissipation_ = 0;
  double int_power_mech_ = 0;    // gravity, external field, traction
  double int_adiabatic_ = 0;
  double int_boundary_heat_ = 0;
  bool cutoff_ever_ = false;
};

// int xi/theta + cond |grad theta|^2/theta^2 over cells with theta > theta_floor.
double entropy_production(const Grid& grid, const ScalarField& xi, const ScalarField& cond,
                          const ScalarField& theta, double theta_floor);

void write_report_csv(const std::string& path, const std::vector<EnergyReport>& series);
std::vector<EnergyReport> read_report_csv(const std::string& path);

}  // namespace magnetoelast
