#include "magnetoelast/scenario.hpp"
#include "magnetoelast/statics.hpp"
#include "magnetoelast/stepper.hpp"
#include "magnetoelast/verification.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

using namespace magnetoelast;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kInvalid = 2;
constexpr int kSolver = 3;

int threads_from_env() {
  for (const char* name : {"MAGNETOELAST_THREADS", "OMP_NUM_THREADS"})
    if (const char* v = std::getenv(name)) {
      const int n = std::atoi(v);
      if (n > 0) return n;
    }
  return 0;
}

Scenario load(const std::string& path) {
  Scenario sc = parse_scenario(path);
  const auto problems = validate(sc);
  if (!problems.empty()) {
    std::vector<std::string> tagged;
    for (const auto& p : problems) tagged.push_back(path + ": " + p);
    throw ValidationError(tagged);
  }
  return sc;
}

std::string default_scenario_dir(const char* argv0) {
  if (const char* d = std::getenv("MAGNETOELAST_SCENARIOS")) return d;
  const auto exe = std::filesystem::weakly_canonical(std::filesystem::path(argv0));
  for (auto dir = exe.parent_path(); !dir.empty(); dir = dir.parent_path()) {
    if (std::filesystem::exists(dir / "scenarios" / "coupled.ini")) return (dir / "scenarios").string();
    if (dir == dir.root_path()) break;
  }
  return "scenarios";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eulerian thermo-magneto-viscoelastic simulator"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = ".";
  int snapshots = -1, threads = 0;
  auto* run_cmd = app.add_subcommand("run", "run a scenario to its end time");
  run_cmd->add_option("scenario", scenario_path, "scenario file")->required();
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--snapshots", snapshots, "snapshot every N steps (0 disables)");
  run_cmd->add_option("--threads", threads, "worker threads");

  bool quick = false;
  std::string check_dir;
  auto* check_cmd = app.add_subcommand("check", "run the acceptance criteria");
  check_cmd->add_flag("--quick", quick, "smaller grids and shorter runs");
  check_cmd->add_option("--scenarios", check_dir, "directory with the shipped scenarios");

  std::string curve_path, curve_out;
  auto* curve_cmd = app.add_subcommand("curve", "equilibrium magnetization against temperature");
  curve_cmd->add_option("scenario", curve_path, "scenario file")->required();
  curve_cmd->add_option("--out", curve_out, "CSV path (default: curve.output)");

  std::string dump_path;
  auto* dump_cmd = app.add_subcommand("dump-config", "print the effective configuration");
  dump_cmd->add_option("scenario", dump_path, "scenario file (defaults when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const Scenario sc = load(scenario_path);
      RunOptions ro;
      ro.out_dir = out_dir;
      ro.snapshots = snapshots;
      ro.threads = threads > 0 ? threads : threads_from_env();
      ro.quiet = false;
      std::filesystem::create_directories(out_dir);
      const RunSummary s = run(sc, ro);
      std::cout << "steps " << s.steps << ", t = " << s.t << ", max residual_mech/scale "
                << s.max_residual_mech << ", max residual_total/scale " << s.max_residual_total
                << ", min theta " << s.min_theta << ", min det F " << s.min_detF << "\n";
      if (s.failed) {
        std::cerr << "solver failure: " << s.error << "\n";
        return kSolver;
      }
      return kOk;
    }
    if (*check_cmd) {
      CheckOptions co;
      co.quick = quick;
      co.scenario_dir = check_dir.empty() ? default_scenario_dir(argv[0]) : check_dir;
      co.on_result = [](const CriterionResult& r) { std::cout << format_result(r) << std::endl; };
      int failed = 0;
      for (const auto& r : run_acceptance(co)) failed += r.passed ? 0 : 1;
      std::cout << (failed ? "FAILED " : "ALL PASSED ") << 9 - failed << "/9\n";
      return failed ? kFailed : kOk;
    }
    if (*curve_cmd) {
      const Scenario sc = load(curve_path);
      RigidMagnet rm;
      rm.a0 = sc.material.a0;
      rm.b0 = sc.material.b0;
      rm.c0 = sc.material.c0;
      rm.theta_c = sc.material.theta_c;
      rm.kappa = sc.material.kappa0;
      rm.mu0 = sc.material.mu0;
      StaticsOptions so;
      so.demag = sc.grid.demag;
      so.pad = sc.grid.pad;
      const auto curve = transition_curve(rm, sc.grid.make(), sc.curve.temperatures(), sc.curve.h, so);
      const std::string path = curve_out.empty() ? sc.curve.output : curve_out;
      write_curve_csv(path, curve);
      for (const auto& p : curve)
        std::cout << p.theta << " " << p.m_norm << " " << p.residual << "\n";
      return kOk;
    }
    if (*dump_cmd) {
      const Scenario sc = dump_path.empty() ? Scenario{} : load(dump_path);
      std::cout << dump_config(sc);
      return kOk;
    }
  } catch (const ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kInvalid;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const PositivityError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const DomainError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kFailed;
  }
  return kOk;
}
