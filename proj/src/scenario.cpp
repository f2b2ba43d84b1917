#include "magnetoelast/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

namespace magnetoelast {

Grid GridSpec::make() const {
  const double sx = hx > 0 ? hx : 1.0 / nx;
  const double sy = hy > 0 ? hy : 1.0 / ny;
  return Grid(nx, ny, sx, sy, mode);
}

Vector3<double> ExternalSpec::h_at(double t) const {
  switch (schedule) {
    case FieldSchedule::constant:
      return h;
    case FieldSchedule::ramp: {
      const double s = period > 0 ? std::clamp(t / period, 0.0, 1.0) : 1.0;
      return (1 - s) * h + s * h_end;
    }
    case FieldSchedule::sinusoid:
      return std::sin(2 * M_PI * t / period) * h;
    case FieldSchedule::triangle: {
      // 0 -> +h -> -h -> 0 over one period
      const double x = t / period - std::floor(t / period);
      double a;
      if (x < 0.25) a = 4 * x;
      else if (x < 0.75) a = 2 - 4 * x;
      else a = 4 * x - 4;
      return a * h;
    }
  }
  return h;
}

std::vector<double> CurveSpec::temperatures() const {
  if (!thetas.empty()) return thetas;
  std::vector<double> out;
  for (int i = 0; i < samples; ++i)
    out.push_back(samples == 1 ? theta_min
                               : theta_min + (theta_max - theta_min) * i / (samples - 1.0));
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected a number, got '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("expected a number, got '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  const double v = to_double(s);
  if (v != std::floor(v)) throw std::invalid_argument("expected an integer, got '" + s + "'");
  return static_cast<int>(v);
}

bool to_bool(const std::string& s) {
  std::string l = s;
  std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
  if (l == "on" || l == "true" || l == "yes" || l == "1") return true;
  if (l == "off" || l == "false" || l == "no" || l == "0") return false;
  throw std::invalid_argument("expected on/off, got '" + s + "'");
}

template <int N>
Eigen::Matrix<double, N, 1> to_vector(const std::string& s) {
  const auto items = split_list(s);
  if (items.size() != N)
    throw std::invalid_argument("expected " + std::to_string(N) + " comma separated numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v(i) = to_double(items[i]);
  return v;
}

// shortest text that reads back to the same double
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <int N>
std::string fmt(const Eigen::Matrix<double, N, 1>& v) {
  std::string out;
  for (int i = 0; i < N; ++i) out += (i ? ", " : "") + fmt(v(i));
  return out;
}

std::string fmt(bool b) { return b ? "on" : "off"; }

struct Key {
  std::function<void(Scenario&, const std::string&)> set;
  std::function<std::string(const Scenario&)> get;
};

using KeyTable = std::vector<std::pair<std::string, Key>>;  // "section.key"

#define NUM(path, member)                                                          \
  {path, Key{[](Scenario& s, const std::string& v) { s.member = to_double(v); }, \
             [](const Scenario& s) { return fmt(s.member); }}}
#define INT(path, member)                                                       \
  {path, Key{[](Scenario& s, const std::string& v) { s.member = to_int(v); }, \
             [](const Scenario& s) { return std::to_string(s.member); }}}
#define BOOL(path, member)                                                       \
  {path, Key{[](Scenario& s, const std::string& v) { s.member = to_bool(v); }, \
             [](const Scenario& s) { return fmt(s.member); }}}
#define STR(path, member)                                                 \
  {path, Key{[](Scenario& s, const std::string& v) { s.member = v; }, \
             [](const Scenario& s) { return s.member; }}}
#define VEC(path, n, member)                                                          \
  {path, Key{[](Scenario& s, const std::string& v) { s.member = to_vector<n>(v); }, \
             [](const Scenario& s) { return fmt(s.member); }}}

const KeyTable& key_table() {
  static const KeyTable table = {
      {"seed", Key{[](Scenario& s, const std::string& v) {
                     const int x = to_int(v);
                     if (x < 0) throw std::invalid_argument("seed must be non-negative");
                     s.seed = static_cast<std::uint64_t>(x);
                   },
                   [](const Scenario& s) { return std::to_string(s.seed); }}},
      NUM("material.G", material.G),
      NUM("material.bulk", material.bulk),
      NUM("material.a0", material.a0),
      NUM("material.b0", material.b0),
      NUM("material.c0", material.c0),
      NUM("material.eps1", material.eps1),
      NUM("material.eps2", material.eps2),
      NUM("material.theta_c", material.theta_c),
      NUM("material.kappa0", material.kappa0),
      {"material.exchange",
       Key{[](Scenario& s, const std::string& v) {
             if (v == "referential") s.material.exchange = ExchangeScaling::referential;
             else if (v == "actual") s.material.exchange = ExchangeScaling::actual;
             else throw std::invalid_argument("exchange must be referential or actual");
           },
           [](const Scenario& s) {
             return std::string(s.material.exchange == ExchangeScaling::actual ? "actual"
                                                                                : "referential");
           }}},
      NUM("material.nu1", material.nu1),
      NUM("material.nu2", material.nu2),
      NUM("material.nu_flat", material.nu_flat),
      NUM("material.tau", material.tau),
      NUM("material.h0", material.h0),
      NUM("material.g0", material.g0),
      NUM("material.mu0", material.mu0),
      NUM("material.cond0", material.cond0),
      NUM("material.p", material.p),
      NUM("material.s", material.s),
      INT("grid.nx", grid.nx),
      INT("grid.ny", grid.ny),
      NUM("grid.hx", grid.hx),
      NUM("grid.hy", grid.hy),
      {"grid.mode", Key{[](Scenario& s, const std::string& v) {
                          if (v == "periodic") s.grid.mode = BoundaryMode::periodic;
                          else if (v == "box") s.grid.mode = BoundaryMode::box;
                          else throw std::invalid_argument("mode must be periodic or box");
                        },
                        [](const Scenario& s) {
                          return std::string(s.grid.mode == BoundaryMode::periodic ? "periodic"
                                                                                   : "box");
                        }}},
      INT("grid.pad", grid.pad),
      BOOL("grid.demag", grid.demag),
      BOOL("grid.planar", grid.planar),
      BOOL("grid.mechanics", grid.mechanics),
      BOOL("grid.thermal", grid.thermal),
      STR("initial.rho0", initial.rho0),
      STR("initial.v0", initial.v0),
      NUM("initial.v_amplitude", initial.v_amplitude),
      NUM("initial.omega", initial.omega),
      STR("initial.F0", initial.F0),
      STR("initial.m0", initial.m0),
      VEC("initial.m_direction", 3, initial.m_direction),
      NUM("initial.m_magnitude", initial.m_magnitude),
      NUM("initial.m_noise", initial.m_noise),
      NUM("initial.m_twist", initial.m_twist),
      NUM("initial.disk_radius", initial.disk_radius),
      STR("initial.theta0", initial.theta0),
      {"external.schedule",
       Key{[](Scenario& s, const std::string& v) {
             static const std::map<std::string, FieldSchedule> names = {
                 {"constant", FieldSchedule::constant}, {"ramp", FieldSchedule::ramp},
                 {"sinusoid", FieldSchedule::sinusoid}, {"triangle", FieldSchedule::triangle}};
             auto it = names.find(v);
             if (it == names.end())
               throw std::invalid_argument("schedule must be constant, ramp, sinusoid or triangle");
             s.external.schedule = it->second;
           },
           [](const Scenario& s) {
             switch (s.external.schedule) {
               case FieldSchedule::ramp: return std::string("ramp");
               case FieldSchedule::sinusoid: return std::string("sinusoid");
               case FieldSchedule::triangle: return std::string("triangle");
               default: return std::string("constant");
             }
           }}},
      VEC("external.h", 3, external.h),
      VEC("external.h_end", 3, external.h_end),
      NUM("external.period", external.period),
      VEC("external.g", 2, external.g),
      NUM("external.k_traction", external.k_traction),
      NUM("external.theta_ext", external.heat.theta_ext),
      NUM("external.kappa_b", external.heat.kappa_b),
      NUM("stepping.t_end", stepping.t_end),
      NUM("stepping.dt_max", stepping.dt_max),
      NUM("stepping.cfl", stepping.cfl),
      {"stepping.scheme",
       Key{[](Scenario& s, const std::string& v) {
             if (v == "upwind1") s.stepping.scheme = AdvectionScheme::upwind1;
             else if (v == "central2_rk2") s.stepping.scheme = AdvectionScheme::central2_rk2;
             else throw std::invalid_argument("scheme must be upwind1 or central2_rk2");
           },
           [](const Scenario& s) {
             return std::string(s.stepping.scheme == AdvectionScheme::upwind1 ? "upwind1"
                                                                               : "central2_rk2");
           }}},
      BOOL("stepping.cutoff", stepping.cutoff),
      NUM("stepping.lambda_cut", material.lambda_cut),
      NUM("stepping.eps_reg", material.eps_reg),
      NUM("stepping.momentum_tol", stepping.momentum_tol),
      NUM("stepping.llg_tol", stepping.llg_tol),
      NUM("stepping.heat_tol", stepping.heat_tol),
      {"stepping.spin_sign",
       Key{[](Scenario& s, const std::string& v) {
             if (v == "plus") s.stepping.spin = SpinSign::plus;
             else if (v == "minus") s.stepping.spin = SpinSign::minus;
             else throw std::invalid_argument("spin_sign must be plus or minus");
           },
           [](const Scenario& s) {
             return std::string(s.stepping.spin == SpinSign::plus ? "plus" : "minus");
           }}},
      BOOL("stepping.advect_momentum", stepping.advect_momentum),
      BOOL("stepping.midpoint", stepping.midpoint),
      STR("output.report", output.report),
      STR("output.trace", output.trace),
      INT("output.snapshot_every", output.snapshot_every),
      {"output.dump_fields",
       Key{[](Scenario& s, const std::string& v) { s.output.dump_fields = split_list(v); },
           [](const Scenario& s) {
             std::string out;
             for (const auto& f : s.output.dump_fields) out += (out.empty() ? "" : ", ") + f;
             return out;
           }}},
      {"curve.thetas",
       Key{[](Scenario& s, const std::string& v) {
             s.curve.thetas.clear();
             for (const auto& x : split_list(v)) s.curve.thetas.push_back(to_double(x));
           },
           [](const Scenario& s) {
             std::string out;
             for (double x : s.curve.thetas) out += (out.empty() ? "" : ", ") + fmt(x);
             return out;
           }}},
      NUM("curve.theta_min", curve.theta_min),
      NUM("curve.theta_max", curve.theta_max),
      INT("curve.samples", curve.samples),
      VEC("curve.h", 3, curve.h),
      STR("curve.output", curve.output),
  };
  return table;
}

#undef NUM
#undef INT
#undef BOOL
#undef STR
#undef VEC

const Key* find_key(const std::string& path) {
  for (const auto& [name, key] : key_table())
    if (name == path) return &key;
  return nullptr;
}

bool is_file(const std::string& spec) { return spec.rfind("file:", 0) == 0; }

std::string resolve(const Scenario& s, const std::string& spec) {
  const std::string p = spec.substr(5);
  if (!p.empty() && p[0] == '/') return p;
  return s.base_dir + "/" + p;
}

Eigen::MatrixXd load_field(const Scenario& s, const Grid& grid, const std::string& spec,
                           int comps, const std::string& name) {
  GridDump d;
  try {
    d = read_dump(resolve(s, spec));
  } catch (const std::exception& e) {
    throw ValidationError({"initial." + name + ": " + e.what()});
  }
  if (d.nx != grid.nx() || d.ny != grid.ny() || d.data.rows() != comps)
    throw ValidationError({"initial." + name + ": dump shape does not match the grid"});
  return d.data;
}

bool is_number(const std::string& s) {
  try {
    to_double(s);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

InitialFields initial_fields(const Scenario& s, const Grid& grid) {
  const int n = grid.cells();
  const InitialSpec& ini = s.initial;
  InitialFields f;
  std::vector<std::string> errors;
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  if (is_file(ini.rho0)) f.rho = load_field(s, grid, ini.rho0, 1, "rho0").row(0).transpose();
  else if (is_number(ini.rho0)) f.rho = ScalarField::Constant(n, to_double(ini.rho0));
  else errors.push_back("initial.rho0: expected a number or file:<path>");

  if (is_file(ini.theta0)) f.theta = load_field(s, grid, ini.theta0, 1, "theta0").row(0).transpose();
  else if (is_number(ini.theta0)) f.theta = ScalarField::Constant(n, to_double(ini.theta0));
  else errors.push_back("initial.theta0: expected a number or file:<path>");

  const double xc = 0.5 * grid.width(), yc = 0.5 * grid.height();
  f.v = VectorField::Zero(2, n);
  if (ini.v0 == "zero") {
  } else if (ini.v0 == "shear") {
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        double vx = ini.v_amplitude * std::sin(2 * M_PI * grid.y(j) / grid.height());
        if (!grid.periodic()) vx *= std::sin(M_PI * grid.x(i) / grid.width());
        f.v(0, grid.index(i, j)) = vx;
      }
  } else if (ini.v0 == "rotation") {
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        f.v(0, grid.index(i, j)) = -ini.omega * (grid.y(j) - yc);
        f.v(1, grid.index(i, j)) = ini.omega * (grid.x(i) - xc);
      }
  } else if (is_file(ini.v0)) {
    f.v = load_field(s, grid, ini.v0, 2, "v0");
  } else {
    errors.push_back("initial.v0: unknown preset '" + ini.v0 + "'");
  }

  if (ini.F0 == "identity") {
    f.F = MatrixField::Zero(4, n);
    f.F.row(0).setOnes();
    f.F.row(3).setOnes();
  } else if (is_file(ini.F0)) {
    f.F = load_field(s, grid, ini.F0, 4, "F0");
  } else {
    errors.push_back("initial.F0: unknown preset '" + ini.F0 + "'");
  }

  Vector3<double> dir = ini.m_direction;
  if (s.grid.planar) dir(2) = 0;
  if (dir.norm() > 0) dir.normalize();
  f.m = MagnetizationField::Zero(3, n);
  if (ini.m0 == "zero") {
  } else if (ini.m0 == "uniform") {
    f.m.colwise() = ini.m_magnitude * dir;
  } else if (ini.m0 == "saturated") {
    if (f.theta.size() == n)
      for (int c = 0; c < n; ++c)
        f.m.col(c) = equilibrium_magnetization(s.material, std::max(f.theta(c), 0.0)) * dir;
  } else if (ini.m0 == "disk") {
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        const double r = std::hypot(grid.x(i) - xc, grid.y(j) - yc);
        if (r <= ini.disk_radius) f.m.col(grid.index(i, j)) = ini.m_magnitude * dir;
      }
  } else if (ini.m0 == "random") {
    for (int c = 0; c < n; ++c) {
      Vector3<double> d(normal(rng), normal(rng), s.grid.planar ? 0.0 : normal(rng));
      f.m.col(c) = ini.m_magnitude * d.normalized();
    }
  } else if (is_file(ini.m0)) {
    f.m = load_field(s, grid, ini.m0, 3, "m0");
  } else {
    errors.push_back("initial.m0: unknown preset '" + ini.m0 + "'");
  }
  if (ini.m_twist != 0) {
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) {
        const double a = ini.m_twist * std::sin(2 * M_PI * grid.x(i) / grid.width()) *
                         std::sin(2 * M_PI * grid.y(j) / grid.height());
        const int c = grid.index(i, j);
        const double mx = f.m(0, c), my = f.m(1, c);
        f.m(0, c) = std::cos(a) * mx - std::sin(a) * my;
        f.m(1, c) = std::sin(a) * mx + std::cos(a) * my;
      }
  }
  if (ini.m_noise > 0) {
    for (int c = 0; c < n; ++c)
      for (int k = 0; k < (s.grid.planar ? 2 : 3); ++k)
        f.m(k, c) += ini.m_noise * ini.m_magnitude * normal(rng);
  }
  if (!errors.empty()) throw ValidationError(errors);
  return f;
}

Scenario parse_scenario_text(const std::string& text, const std::string& base_dir) {
  Scenario s;
  s.base_dir = base_dir;
  std::vector<std::string> errors;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(where + "malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      static const std::vector<std::string> known = {"material", "grid",   "initial", "external",
                                                     "stepping", "output", "curve",   "run"};
      if (std::find(known.begin(), known.end(), section) == known.end())
        errors.push_back(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + "expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string path = (section.empty() || section == "run") ? key : section + "." + key;
    const Key* k = find_key(path);
    if (!k) {
      errors.push_back(where + "unknown key '" + path + "'");
      continue;
    }
    if (seen.count(path))
      errors.push_back(where + "duplicate key '" + path + "' (first on line " +
                       std::to_string(seen[path]) + ")");
    seen[path] = lineno;
    try {
      k->set(s, value);
    } catch (const std::exception& e) {
      errors.push_back(where + path + ": " + e.what());
    }
  }
  if (!errors.empty()) throw ValidationError(errors);
  // semantic checks, reported with the line of the offending key when it was given
  auto line_of = [&](const std::string& msg) {
    for (const auto& [path, ln] : seen) {
      const auto dot = path.rfind('.');
      const std::string key = dot == std::string::npos ? path : path.substr(dot + 1);
      if (msg.rfind(path + ":", 0) == 0 || msg.rfind(key + " ", 0) == 0)
        return "line " + std::to_string(ln) + ": " + msg;
    }
    return msg;
  };
  std::vector<std::string> semantic = validate(s);
  for (auto& msg : semantic) msg = line_of(msg);
  if (!semantic.empty()) throw ValidationError(semantic);
  return s;
}

Scenario parse_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError({"cannot open scenario file " + path});
  std::stringstream buf;
  buf << f.rdbuf();
  std::string dir = ".";
  const auto slash = path.rfind('/');
  if (slash != std::string::npos) dir = path.substr(0, slash);
  return parse_scenario_text(buf.str(), dir);
}

std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> out;
  for (const auto& msg : validate(s.material)) {
    // prefix with the config path so the parser can attach line numbers
    const auto sp = msg.find(' ');
    const std::string key = msg.substr(0, sp);
    const bool stepping = key == "lambda_cut" || key == "eps_reg";
    out.push_back((stepping ? "stepping." : "material.") + key + ":" + msg.substr(sp));
  }
  auto need = [&out](bool ok, const std::string& msg) {
    if (!ok) out.push_back(msg);
  };
  need(s.grid.nx >= 4 && s.grid.ny >= 4, "grid.nx: nx and ny must be at least 4");
  need(s.grid.hx >= 0 && s.grid.hy >= 0, "grid.hx: spacings must be positive (0 selects 1/n)");
  need(s.grid.pad >= 2, "grid.pad: demag padding must be at least 2");
  need(s.stepping.t_end >= 0, "stepping.t_end: must be non-negative");
  need(s.stepping.dt_max > 0, "stepping.dt_max: must be positive");
  need(s.stepping.cfl > 0 && s.stepping.cfl <= 1, "stepping.cfl: must lie in (0, 1]");
  need(s.external.period > 0, "external.period: must be positive");
  need(s.external.heat.kappa_b >= 0, "external.kappa_b: must be non-negative");
  need(s.external.heat.theta_ext >= 0, "external.theta_ext: must be non-negative");
  need(s.output.snapshot_every >= 0, "output.snapshot_every: must be non-negative");
  need(s.curve.samples >= 1, "curve.samples: must be positive");
  for (std::size_t i = 1; i < s.curve.thetas.size(); ++i)
    need(s.curve.thetas[i] > s.curve.thetas[i - 1], "curve.thetas: temperatures must ascend");
  for (double t : s.curve.thetas) need(t >= 0, "curve.thetas: temperatures must be non-negative");
  static const std::vector<std::string> dumpable = {"rho", "v", "F", "m", "theta", "w"};
  for (const auto& f : s.output.dump_fields)
    need(std::find(dumpable.begin(), dumpable.end(), f) != dumpable.end(),
         "output.dump_fields: unknown field '" + f + "'");
  if (!out.empty()) return out;

  // initial data
  try {
    const Grid grid = s.grid.make();
    const InitialFields f = initial_fields(s, grid);
    need(f.rho.minCoeff() > 0, "initial.rho0: density must satisfy rho0 > 0");
    need(f.theta.minCoeff() >= 0, "initial.theta0: temperature must satisfy theta0 >= 0");
    double min_det = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < f.F.cols(); ++c)
      min_det = std::min(min_det, f.F(0, c) * f.F(3, c) - f.F(1, c) * f.F(2, c));
    need(min_det > 0, "initial.F0: deformation gradient must satisfy min det F0 > 0");
    need(f.v.allFinite() && f.m.allFinite() && f.F.allFinite() && f.theta.allFinite() &&
             f.rho.allFinite(),
         "initial.v0: initial fields must be finite");
  } catch (const ValidationError& e) {
    for (const auto& v : e.violations()) out.push_back(v);
  } catch (const std::exception& e) {
    out.push_back(std::string("grid.nx: ") + e.what());
  }
  return out;
}

std::string dump_config(const Scenario& s) {
  std::ostringstream out;
  std::string section = "";
  for (const auto& [path, key] : key_table()) {
    const auto dot = path.find('.');
    const std::string sec = dot == std::string::npos ? "" : path.substr(0, dot);
    const std::string name = dot == std::string::npos ? path : path.substr(dot + 1);
    if (sec != section) {
      out << "\n[" << sec << "]\n";
      section = sec;
    }
    out << name << " = " << key.get(s) << "\n";
  }
  return out.str();
}

}  // namespace magnetoelast
