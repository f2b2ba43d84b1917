#include "magnetoelast/diagnostics.hpp"

#include "magnetoelast/llg.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace magnetoelast {

double EnergySnapshot::scale() const {
  return std::abs(kinetic) + std::abs(stored) + std::abs(exchange) + std::abs(zeeman) +
         std::abs(demag) + std::abs(heat);
}

EnergySnapshot measure(const Grid& grid, const Material& mat, const SnapshotInput& in) {
  const Eigen::Index n = grid.cells();
  const double area = grid.cell_area();
  const std::vector<CellClosure>& cl = *in.closures;
  EnergySnapshot s;
  ScalarField k(n);
  s.min_theta = std::numeric_limits<double>::infinity();
  s.min_detF = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < n; ++c) {
    s.kinetic += 0.5 * (*in.rho)(c) * in.v->col(c).squaredNorm();
    s.stored += cl[c].phi / cl[c].J;
    k(c) = cl[c].k;
    s.zeeman -= mat.mu0 * in.h_ext->col(c).dot(in.m->col(c));
    s.heat += (*in.w)(c);
    s.total_mass += (*in.rho)(c);
    s.min_theta = std::min(s.min_theta, (*in.theta)(c));
    s.min_detF = std::min(s.min_detF, cl[c].J);
    const double th = (*in.theta)(c);
    if (th > 0) {
      const Matrix2<double> Fc = Eigen::Map<const Eigen::Matrix2d>(in.F->col(c).data());
      s.entropy += entropy(mat, Fc, Vector3<double>(in.m->col(c)), th);
    }
  }
  s.kinetic *= area;
  s.stored *= area;
  s.zeeman *= area;
  s.heat *= area;
  s.total_mass *= area;
  s.entropy *= area;
  s.exchange = exchange_energy(grid, k, *in.m);
  if (in.demag) s.demag = demag_energy(*in.demag, *in.m, mat.mu0).field_energy;
  return s;
}

const std::array<const char*, 24>& EnergyReport::columns() {
  static const std::array<const char*, 24> names = {
      "step", "time", "kinetic", "stored", "exchange", "zeeman", "demag", "heat",
      "dissipation_bulk", "dissipation_boundary", "power_gravity", "power_external_field",
      "power_traction", "power_boundary_heat", "adiabatic_bulk", "residual_mech",
      "residual_total", "min_theta", "min_detF", "total_mass", "entropy_production", "entropy",
      "energy_scale", "cutoff_active"};
  return names;
}

const std::array<double EnergyReport::*, 24>& EnergyReport::members() {
  static const std::array<double EnergyReport::*, 24> ptrs = {
      &EnergyReport::step, &EnergyReport::time, &EnergyReport::kinetic, &EnergyReport::stored,
      &EnergyReport::exchange, &EnergyReport::zeeman, &EnergyReport::demag, &EnergyReport::heat,
      &EnergyReport::dissipation_bulk, &EnergyReport::dissipation_boundary,
      &EnergyReport::power_gravity, &EnergyReport::power_external_field,
      &EnergyReport::power_traction, &EnergyReport::power_boundary_heat,
      &EnergyReport::adiabatic_bulk, &EnergyReport::residual_mech, &EnergyReport::residual_total,
      &EnergyReport::min_theta, &EnergyReport::min_detF, &EnergyReport::total_mass,
      &EnergyReport::entropy_production, &EnergyReport::entropy, &EnergyReport::energy_scale,
      &EnergyReport::cutoff_active};
  return ptrs;
}

namespace {

void fill_state(EnergyReport& r, const EnergySnapshot& s) {
  r.kinetic = s.kinetic;
  r.stored = s.stored;
  r.exchange = s.exchange;
  r.zeeman = s.zeeman;
  r.demag = s.demag;
  r.heat = s.heat;
  r.min_theta = s.min_theta;
  r.min_detF = s.min_detF;
  r.total_mass = s.total_mass;
  r.entropy = s.entropy;
}

}  // namespace

Auditor::Auditor(const EnergySnapshot& initial, double time)
    : start_(initial), time_(time), scale_(initial.scale()) {
  fill_state(initial_, initial);
  initial_.time = time;
  initial_.energy_scale = scale_;
}

EnergyReport Auditor::audit(const EnergySnapshot& after, const StepFluxes& f) {
  const double dt = f.dt;
  ++step_;
  time_ += dt;
  int_dissipation_ += dt * (f.dissipation_bulk + f.dissipation_boundary);
  int_boundary_dissipation_ += dt * f.dissipation_boundary;
  int_power_mech_ += dt * (f.power_gravity + f.power_external_field + f.power_traction);
  int_adiabatic_ += dt * f.adiabatic_bulk;
  int_boundary_heat_ += dt * f.power_boundary_heat;
  cutoff_ever_ = cutoff_ever_ || f.cutoff_active;
  scale_ = std::max(scale_, after.scale());

  EnergyReport r;
  fill_state(r, after);
  r.step = static_cast<double>(step_);
  r.time = time_;
  r.dissipation_bulk = f.dissipation_bulk;
  r.dissipation_boundary = f.dissipation_boundary;
  r.power_gravity = f.power_gravity;
  r.power_external_field = f.power_external_field;
  r.power_traction = f.power_traction;
  r.power_boundary_heat = f.power_boundary_heat;
  r.adiabatic_bulk = f.adiabatic_bulk;
  r.entropy_production = f.entropy_production;
  r.energy_scale = scale_;
  r.cutoff_active = cutoff_ever_ ? 1.0 : 0.0;

  const double dE_mech = after.mechanical() - start_.mechanical();
  const double dE_total = after.total() - start_.total();
  r.residual_mech = std::abs(dE_mech + int_dissipation_ - int_power_mech_ + int_adiabatic_);
  // bulk dissipation and adiabatic exchange move energy between the two parts and drop out
  r.residual_total =
      std::abs(dE_total + int_boundary_dissipation_ - int_power_mech_ - int_boundary_heat_);
  return r;
}

double entropy_production(const Grid& grid, const ScalarField& xi, const ScalarField& cond,
                          const ScalarField& theta, double theta_floor) {
  const VectorField g = grad(grid, theta);
  double s = 0;
  for (Eigen::Index c = 0; c < theta.size(); ++c) {
    const double th = theta(c);
    if (!(th > theta_floor)) continue;
    s += xi(c) / th + cond(c) * g.col(c).squaredNorm() / (th * th);
  }
  return grid.cell_area() * s;
}

void write_report_csv(const std::string& path, const std::vector<EnergyReport>& series) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  const auto& cols = EnergyReport::columns();
  const auto& mem = EnergyReport::members();
  for (std::size_t i = 0; i < cols.size(); ++i) f << (i ? "," : "") << cols[i];
  f << '\n' << std::setprecision(17);
  for (const EnergyReport& r : series) {
    for (std::size_t i = 0; i < mem.size(); ++i) f << (i ? "," : "") << r.*mem[i];
    f << '\n';
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<EnergyReport> read_report_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("missing header in " + path);
  std::vector<EnergyReport> out;
  const auto& mem = EnergyReport::members();
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    EnergyReport r;
    std::size_t i = 0;
    while (std::getline(ss, cell, ',')) {
      if (i >= mem.size()) throw std::runtime_error("too many columns in " + path);
      r.*mem[i++] = std::strtod(cell.c_str(), nullptr);
    }
    if (i != mem.size()) throw std::runtime_error("too few columns in " + path);
    out.push_back(r);
  }
  return out;
}

}  // namespace magnetoelast
