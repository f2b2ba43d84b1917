#pragma once

#include "magnetoelast/constitutive.hpp"
#include "magnetoelast/grid.hpp"
#include "magnetoelast/heat.hpp"
#include "magnetoelast/transport.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace magnetoelast {

struct GridSpec {
  int nx = 64;
  int ny = 64;
  double hx = 0;  // 0: unit square
  double hy = 0;
  BoundaryMode mode = BoundaryMode::box;
  int pad = 4;
  bool demag = true;
  bool planar = true;      // in-plane magnetization without gyroscopic term
  bool mechanics = true;   // false: rigid body at rest, F and rho frozen
  bool thermal = true;     // false: isothermal, theta frozen

  Grid make() const;
};

// Initial fields: a number, a preset name, or "file:<path>" to a grid dump.
struct InitialSpec {
  std::string rho0 = "1";
  std::string v0 = "zero";          // zero | shear | rotation | file:
  double v_amplitude = 0.05;        // shear amplitude
  double omega = 1.0;               // rotation rate
  std::string F0 = "identity";      // identity | file:
  std::string m0 = "saturated";     // zero | uniform | saturated | disk | random | file:
  Vector3<double> m_direction = Vector3<double>::UnitX();
  double m_magnitude = 1.0;         // for uniform and disk
  double m_noise = 0.0;             // relative random perturbation
  double m_twist = 0.0;             // smooth in-plane rotation: angle m_twist sin(2 pi x) sin(2 pi y)
  double disk_radius = 0.25;
  std::string theta0 = "0.5";
};

enum class FieldSchedule { constant, ramp, sinusoid, triangle };

struct ExternalSpec {
  FieldSchedule schedule = FieldSchedule::constant;
  Vector3<double> h = Vector3<double>::Zero();      // value, amplitude or ramp start
  Vector3<double> h_end = Vector3<double>::Zero();  // ramp end
  double period = 1.0;                              // ramp duration or cycle length
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  double k_traction = 0;
  HeatBoundary heat;

  Vector3<double> h_at(double t) const;
};

struct SteppingSpec {
  double t_end = 0.1;
  double dt_max = 1e-3;
  double cfl = 0.4;
  AdvectionScheme scheme = AdvectionScheme::upwind1;
  bool cutoff = true;
  double momentum_tol = 1e-10;
  double llg_tol = 1e-12;
  double heat_tol = 1e-12;
  SpinSign spin = SpinSign::plus;
  bool advect_momentum = true;
  bool midpoint = true;  // implicit midpoint for the momentum step, else backward Euler
};

struct OutputSpec {
  std::string report = "report.csv";
  std::string trace = "trace.csv";
  int snapshot_every = 0;  // 0: no snapshots
  std::vector<std::string> dump_fields = {"rho", "v", "F", "m", "theta"};
};

struct CurveSpec {
  std::vector<double> thetas;  // explicit list; otherwise an even sampling
  double theta_min = 0.0;
  double theta_max = 1.5;
  int samples = 20;
  Vector3<double> h = Vector3<double>::Zero();
  std::string output = "curve.csv";

  std::vector<double> temperatures() const;
};

struct Scenario {
  Material material;
  GridSpec grid;
  InitialSpec initial;
  ExternalSpec external;
  SteppingSpec stepping;
  OutputSpec output;
  CurveSpec curve;
  std::uint64_t seed = 0;
  std::string base_dir = ".";  // file: paths are relative to it

  Regularization regularization() const {
    return Regularization{stepping.cutoff, material.lambda_cut, material.eps_reg};
  }
};

struct InitialFields {
  ScalarField rho;
  VectorField v;
  MatrixField F;
  MagnetizationField m;
  ScalarField theta;
};

// Builds the initial fields from presets or grid dumps; throws ValidationError on bad files.
InitialFields initial_fields(const Scenario& scenario, const Grid& grid);

// Flat sections of key = value; '#' starts a comment; lists are comma separated.
// Throws ValidationError listing every problem with its line number.
Scenario parse_scenario_text(const std::string& text, const std::string& base_dir = ".");
Scenario parse_scenario(const std::string& path);

// Cross-field checks, including the initial data; empty when valid.
std::vector<std::string> validate(const Scenario& scenario);

// Effective configuration in the input format.
std::string dump_config(const Scenario& scenario);

}  // namespace magnetoelast
