#pragma once

#include "magnetoelast/demag.hpp"
#include "magnetoelast/diagnostics.hpp"
#include "magnetoelast/scenario.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace magnetoelast {

struct State {
  ScalarField rho;
  VectorField v;
  MatrixField F;
  MagnetizationField m;
  ScalarField w;
  ScalarField theta;
  double t = 0;
};

// Per-cell closures at (F, m, theta); evaluated in parallel.
std::vector<CellClosure> closures_of(const Material& mat, const Regularization& reg,
                                     const MatrixField& F, const MagnetizationField& m,
                                     const ScalarField& theta);

// Fields produced inside one step, kept for inspection and tests.
struct StepDetail {
  double dt = 0;
  MagnetizationField r;            // corotational rate from the Gilbert step
  ScalarField xi;                  // dissipation rate per cell
  ScalarField adiabatic;           // sum of the adiabatic sources per cell
  VectorField v_mid;               // velocity the implicit momentum terms were evaluated at
  int momentum_iterations = 0;
  int llg_sweeps = 0;
  int heat_iterations = 0;
  double max_density_drift = 0;    // max |rho det F - rho_ref| / rho_ref
  bool cutoff_active = false;
};

class Simulation {
 public:
  explicit Simulation(const Scenario& scenario);
  Simulation(const Scenario& scenario, State initial);
  ~Simulation();

  const Grid& grid() const { return grid_; }
  const State& state() const { return state_; }
  const Scenario& scenario() const { return scenario_; }
  const EnergySnapshot& snapshot() const { return snapshot_; }
  const EnergyReport& last_report() const { return last_; }
  const StepDetail& last_detail() const { return detail_; }

  // External field at time t as a grid field (z dropped in planar mode).
  MagnetizationField external_field(double t) const;

  // CFL-limited step size, capped by dt_max and the remaining time.
  double next_dt() const;
  EnergyReport step(double dt);

 private:
  EnergySnapshot measure_state(const std::vector<CellClosure>& closures,
                               const std::optional<DemagSolution>& demag) const;
  void initialise();

  Scenario scenario_;
  Grid grid_;
  State state_;
  ScalarField rho_ref_;
  std::unique_ptr<DemagSolver> demag_;
  std::unique_ptr<Auditor> auditor_;
  EnergySnapshot snapshot_;
  EnergyReport last_;
  StepDetail detail_;
  // previous momentum solve, used to extrapolate the Newton starting point
  VectorField prev_v_, prev_x_;
  double prev_dt_ = 0;
};

struct RunOptions {
  std::string out_dir = ".";
  int snapshots = -1;  // overrides output.snapshot_every when >= 0
  int threads = 0;     // 0: environment default
  bool quiet = true;
};

struct RunSummary {
  int steps = 0;
  double t = 0;
  bool failed = false;
  std::string error;
  double max_residual_mech = 0;   // relative to the energy scale
  double max_residual_total = 0;
  double min_theta = 0;
  double min_detF = 0;
  double max_mass_drift = 0;      // relative, per step
  double max_density_drift = 0;
  bool cutoff_active = false;
  std::vector<EnergyReport> reports;
};

// Runs to t_end, writing the report and trace CSVs and the scheduled snapshots. Solver
// failures are caught: outputs are flushed, the failing state is dumped and failed is set.
RunSummary run(const Scenario& scenario, const RunOptions& options = {});

void set_threads(int threads);

}  // namespace magnetoelast
