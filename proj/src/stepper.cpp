#include "magnetoelast/stepper.hpp"

#include "magnetoelast/heat.hpp"
#include "magnetoelast/llg.hpp"
#include "magnetoelast/momentum.hpp"
#include "magnetoelast/transport.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace magnetoelast {

std::vector<CellClosure> closures_of(const Material& mat, const Regularization& reg,
                                     const MatrixField& F, const MagnetizationField& m,
                                     const ScalarField& theta) {
  const Eigen::Index n = m.cols();
  std::vector<CellClosure> out(n);
  std::string error;
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < n; ++c) {
    try {
      const Matrix2<double> Fc = Eigen::Map<const Eigen::Matrix2d>(F.col(c).data());
      out[c] = cell_closure(mat, reg, Fc, Vector3<double>(m.col(c)), theta(c));
    } catch (const std::exception& e) {
#pragma omp critical
      error = "cell " + std::to_string(c) + ": " + e.what();
    }
  }
  if (!error.empty()) throw DomainError(error);
  return out;
}

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

namespace {

State state_from(const Scenario& s, const Grid& grid) {
  const InitialFields f = initial_fields(s, grid);
  State st;
  st.rho = f.rho;
  st.v = s.grid.mechanics ? f.v : VectorField::Zero(2, grid.cells());
  st.F = f.F;
  st.m = f.m;
  if (s.grid.planar) st.m.row(2).setZero();
  st.theta = f.theta;
  st.w.resize(grid.cells());
  for (int c = 0; c < grid.cells(); ++c) {
    const Matrix2<double> Fc = Eigen::Map<const Eigen::Matrix2d>(st.F.col(c).data());
    st.w(c) = enthalpy(s.material, Fc, Vector3<double>(st.m.col(c)), st.theta(c));
  }
  return st;
}

}  // namespace

Simulation::Simulation(const Scenario& scenario)
    : scenario_(scenario), grid_(scenario.grid.make()) {
  const auto problems = validate(scenario_);
  if (!problems.empty()) throw ValidationError(problems);
  state_ = state_from(scenario_, grid_);
  initialise();
}

Simulation::Simulation(const Scenario& scenario, State initial)
    : scenario_(scenario), grid_(scenario.grid.make()), state_(std::move(initial)) {
  initialise();
}

Simulation::~Simulation() = default;

void Simulation::initialise() {
  if (scenario_.grid.demag) demag_ = std::make_unique<DemagSolver>(grid_, scenario_.grid.pad);
  rho_ref_.resize(grid_.cells());
  for (int c = 0; c < grid_.cells(); ++c)
    rho_ref_(c) = state_.rho(c) * (state_.F(0, c) * state_.F(3, c) - state_.F(1, c) * state_.F(2, c));
  const auto cl = closures_of(scenario_.material, scenario_.regularization(), state_.F, state_.m,
                              state_.theta);
  std::optional<DemagSolution> d;
  if (demag_) d = demag_->solve(state_.m);
  snapshot_ = measure_state(cl, d);
  auditor_ = std::make_unique<Auditor>(snapshot_, state_.t);
  last_ = auditor_->initial_report();
}

MagnetizationField Simulation::external_field(double t) const {
  Vector3<double> h = scenario_.external.h_at(t);
  if (scenario_.grid.planar) h(2) = 0;
  MagnetizationField f(3, grid_.cells());
  f.colwise() = h;
  return f;
}

EnergySnapshot Simulation::measure_state(const std::vector<CellClosure>& closures,
                                         const std::optional<DemagSolution>& demag) const {
  const MagnetizationField h_ext = external_field(state_.t);
  SnapshotInput in;
  in.rho = &state_.rho;
  in.v = &state_.v;
  in.F = &state_.F;
  in.m = &state_.m;
  in.w = &state_.w;
  in.theta = &state_.theta;
  in.closures = &closures;
  in.h_ext = &h_ext;
  in.demag = demag ? &*demag : nullptr;
  return measure(grid_, scenario_.material, in);
}

double Simulation::next_dt() const {
  const SteppingSpec& st = scenario_.stepping;
  double dt = st.dt_max;
  if (scenario_.grid.mechanics) dt = stable_dt(grid_, state_.v, st.cfl, st.dt_max);
  const double remaining = st.t_end - state_.t;
  if (remaining > 0 && remaining < dt * (1 + 1e-9)) dt = remaining;
  return dt;
}

EnergyReport Simulation::step(double dt) {
  const Scenario& sc = scenario_;
  const Material& mat = sc.material;
  const Regularization reg = sc.regularization();
  const Eigen::Index n = grid_.cells();
  const double area = grid_.cell_area();
  const TransportStep ts{dt, sc.stepping.scheme, sc.stepping.cfl};
  StepDetail detail;
  detail.dt = dt;

  // 1-2. kinematics and transport of rho, F and m with r = 0
  State next = state_;
  MagnetizationField m_star = state_.m;
  Kinematics kin{state_.v, MatrixField::Zero(4, n)};
  if (sc.grid.mechanics) {
    kin = kinematics(grid_, state_.v);
    next.rho = advance_density(grid_, state_.rho, state_.v, ts);
    const double floor = reg.cutoff ? 0.0 : 0.5 * reg.lambda;
    next.F = advance_defgrad(grid_, state_.F, kin, ts, floor).F;
    m_star = advance_magnetization(grid_, state_.m, kin, MagnetizationField::Zero(3, n), ts);
  }

  // 3. demagnetizing field of the transported magnetization
  const MagnetizationField h_ext = external_field(state_.t);
  MagnetizationField h = h_ext;
  if (demag_) h.topRows<2>() += demag_->solve(m_star).h_dem;

  // 4. Gilbert step
  const auto cl_llg = closures_of(mat, reg, next.F, m_star, state_.theta);
  LLGOptions lo;
  lo.planar = sc.grid.planar;
  lo.tol = sc.stepping.llg_tol;
  const LLGResult llg = llg_step(grid_, mat, cl_llg, m_star, h, dt, lo);
  next.m = llg.m;
  detail.r = llg.r;
  detail.llg_sweeps = llg.sweeps;

  // 5. momentum
  const auto cl = closures_of(mat, reg, next.F, next.m, state_.theta);
  for (const auto& c : cl) detail.cutoff_active = detail.cutoff_active || c.pi < 1.0;
  ScalarField visc = ScalarField::Zero(n);
  MatrixField e = MatrixField::Zero(4, n);
  Rank3Field G2 = Rank3Field::Zero(8, n);
  VectorField v_mid = VectorField::Zero(2, n);
  MomentumResult mom;
  if (sc.grid.mechanics) {
    const StressBundle sb =
        assemble_stresses(grid_, mat, cl, state_.v, next.m, h, sc.stepping.scheme);
    MomentumInput in;
    in.rho = next.rho;
    in.v = state_.v;
    in.stress = sb.explicit_stress();
    in.force = sb.magnetic_force;
    in.g = sc.external.g;
    in.k_traction = sc.external.k_traction;
    in.dt = dt;
    in.scheme = sc.stepping.scheme;
    in.advect = sc.stepping.advect_momentum;
    in.midpoint = sc.stepping.midpoint;
    // the unknown minus the old velocity scales with dt, so the last step extrapolates it
    if (prev_dt_ > 0) in.guess = state_.v + (dt / prev_dt_) * (prev_x_ - prev_v_);
    MomentumOptions mo;
    mo.tol = sc.stepping.momentum_tol;
    mom = momentum_step(grid_, mat, in, mo);
    next.v = mom.v;
    v_mid = mom.v_mid;
    visc = mom.viscous_dissipation;
    e = mom.e;
    G2 = mom.G2;
    detail.momentum_iterations = mom.newton_iterations;
    prev_v_ = state_.v;
    prev_x_ = sc.stepping.midpoint ? mom.v_mid : mom.v;
    prev_dt_ = dt;
  }
  detail.v_mid = v_mid;

  // 6. heat
  ScalarField xi = visc + llg.heat;
  ScalarField xi_heat = xi;
  if (reg.eps > 0) {
    const double hp = mat.p / 2;
    for (Eigen::Index c = 0; c < n; ++c)
      xi_heat(c) = xi(c) / (1 + reg.eps * std::pow(e.col(c).squaredNorm(), hp) +
                            reg.eps * std::pow(G2.col(c).squaredNorm(), hp) +
                            reg.eps * llg.r.col(c).squaredNorm());
  }
  const MatrixField L_mid = sc.grid.mechanics ? velocity_gradient(grid_, v_mid) : MatrixField::Zero(4, n);
  HeatSources src;
  src.xi = xi_heat;
  src.adiabatic = adiabatic_sources(cl, e, L_mid, next.m, llg.r, sc.stepping.spin);
  src.navier = mom.navier;
  double adiabatic_power = area * (src.adiabatic.from_F + src.adiabatic.from_m).sum();
  double boundary_heat = 0;
  if (sc.grid.thermal) {
    HeatOptions ho;
    ho.tol = sc.stepping.heat_tol;
    const HeatResult hr = heat_step(grid_, mat, cl, next.F, next.m, state_.w, state_.theta,
                                    state_.v, src, sc.external.heat, ts, ho);
    next.w = hr.w;
    next.theta = hr.theta;
    adiabatic_power = hr.adiabatic_power;
    boundary_heat = hr.exchange_power + hr.navier_power;
    detail.heat_iterations = hr.newton_iterations;
  } else {
    // isothermal: theta is held; the enthalpy follows the new state
    for (Eigen::Index c = 0; c < n; ++c) {
      const Matrix2<double> Fc = Eigen::Map<const Eigen::Matrix2d>(next.F.col(c).data());
      next.w(c) = enthalpy(mat, Fc, Vector3<double>(next.m.col(c)), next.theta(c));
    }
    adiabatic_power = 0;
  }
  next.t = state_.t + dt;

  // 7-8. end-of-step demag and audit
  StepFluxes fx;
  fx.dt = dt;
  fx.dissipation_bulk = area * xi.sum();
  fx.dissipation_boundary = mom.boundary_dissipation;
  fx.power_gravity = mom.power_gravity;
  fx.power_traction = mom.power_traction;
  {
    const MagnetizationField h_new = external_field(next.t);
    fx.power_external_field = -mat.mu0 * area * ((h_new - h_ext).cwiseProduct(next.m)).sum() / dt;
  }
  fx.power_boundary_heat = boundary_heat;
  fx.adiabatic_bulk = adiabatic_power;
  {
    ScalarField cond(n);
    for (Eigen::Index c = 0; c < n; ++c) cond(c) = cl[c].cond;
    const double theta_scale = std::max(next.theta.cwiseAbs().maxCoeff(), 1e-300);
    fx.entropy_production = entropy_production(grid_, xi, cond, next.theta, 1e-12 * theta_scale);
  }
  fx.cutoff_active = detail.cutoff_active;

  state_ = std::move(next);
  std::optional<DemagSolution> d;
  if (demag_) d = demag_->solve(state_.m);
  snapshot_ = measure_state(cl, d);
  last_ = auditor_->audit(snapshot_, fx);

  for (Eigen::Index c = 0; c < n; ++c) {
    const double J = state_.F(0, c) * state_.F(3, c) - state_.F(1, c) * state_.F(2, c);
    detail.max_density_drift =
        std::max(detail.max_density_drift, std::abs(state_.rho(c) * J - rho_ref_(c)) / rho_ref_(c));
  }
  detail.xi = xi;
  detail.adiabatic = src.adiabatic.from_F + src.adiabatic.from_m;
  detail_ = std::move(detail);
  return last_;
}

namespace {

void dump_state(const std::string& dir, const std::string& prefix, const Grid& grid,
                const State& s, const std::vector<std::string>& fields) {
  for (const auto& f : fields) {
    const std::string path = dir + "/" + prefix + "_" + f + ".bin";
    if (f == "rho") write_dump(path, f, grid, s.rho.transpose());
    else if (f == "v") write_dump(path, f, grid, s.v);
    else if (f == "F") write_dump(path, f, grid, s.F);
    else if (f == "m") write_dump(path, f, grid, s.m);
    else if (f == "theta") write_dump(path, f, grid, s.theta.transpose());
    else if (f == "w") write_dump(path, f, grid, s.w.transpose());
  }
}

std::string join(const std::string& dir, const std::string& file) {
  if (!file.empty() && file[0] == '/') return file;
  return dir + "/" + file;
}

class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path) : f_(path) {
    if (!f_) throw std::runtime_error("cannot open " + path);
    f_ << "time,hx,hy,hz,mx,my,mz,m_norm,theta\n" << std::setprecision(17);
  }
  void write(double t, const Vector3<double>& h, const State& s) {
    const Vector3<double> mean = s.m.rowwise().mean();
    f_ << t << ',' << h(0) << ',' << h(1) << ',' << h(2) << ',' << mean(0) << ',' << mean(1)
       << ',' << mean(2) << ',' << s.m.colwise().norm().mean() << ',' << s.theta.mean() << '\n';
  }
  void flush() { f_.flush(); }

 private:
  std::ofstream f_;
};

}  // namespace

RunSummary run(const Scenario& scenario, const RunOptions& options) {
  set_threads(options.threads);
  std::filesystem::create_directories(options.out_dir);
  RunSummary sum;
  Simulation sim(scenario);
  const int every = options.snapshots >= 0 ? options.snapshots : scenario.output.snapshot_every;
  TraceWriter trace(join(options.out_dir, scenario.output.trace));
  trace.write(sim.state().t, scenario.external.h_at(sim.state().t), sim.state());
  sum.reports.push_back(sim.last_report());
  sum.min_theta = sim.snapshot().min_theta;
  sum.min_detF = sim.snapshot().min_detF;
  if (every > 0) dump_state(options.out_dir, "snap_000000", sim.grid(), sim.state(), scenario.output.dump_fields);
  const double t_end = scenario.stepping.t_end;
  try {
    while (sim.state().t < t_end * (1 - 1e-12)) {
      const double mass0 = sim.snapshot().total_mass;
      const EnergyReport r = sim.step(sim.next_dt());
      ++sum.steps;
      sum.reports.push_back(r);
      trace.write(r.time, scenario.external.h_at(r.time), sim.state());
      const double scale = std::max(r.energy_scale, 1e-300);
      sum.max_residual_mech = std::max(sum.max_residual_mech, r.residual_mech / scale);
      sum.max_residual_total = std::max(sum.max_residual_total, r.residual_total / scale);
      sum.min_theta = std::min(sum.min_theta, r.min_theta);
      sum.min_detF = std::min(sum.min_detF, r.min_detF);
      sum.max_mass_drift = std::max(sum.max_mass_drift, std::abs(r.total_mass - mass0) / mass0);
      sum.max_density_drift = std::max(sum.max_density_drift, sim.last_detail().max_density_drift);
      sum.cutoff_active = sum.cutoff_active || r.cutoff_active > 0;
      if (every > 0 && sum.steps % every == 0) {
        char prefix[32];
        std::snprintf(prefix, sizeof prefix, "snap_%06d", sum.steps);
        dump_state(options.out_dir, prefix, sim.grid(), sim.state(), scenario.output.dump_fields);
      }
      if (!options.quiet && sum.steps % 50 == 0)
        std::cerr << "step " << sum.steps << " t=" << r.time << " residual_total/scale="
                  << r.residual_total / scale << "\n";
    }
  } catch (const std::exception& e) {
    sum.failed = true;
    sum.error = std::string("step ") + std::to_string(sum.steps + 1) + ": " + e.what();
    dump_state(options.out_dir, "failure", sim.grid(), sim.state(),
               {"rho", "v", "F", "m", "theta", "w"});
  }
  sum.t = sim.state().t;
  trace.flush();
  write_report_csv(join(options.out_dir, scenario.output.report), sum.reports);
  return sum;
}

}  // namespace magnetoelast
