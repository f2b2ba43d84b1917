#pragma once

#include <functional>
#include <string>
#include <vector>

namespace magnetoelast {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

struct CheckOptions {
  bool quick = false;           // smaller grids and shorter runs; not at acceptance scale
  std::string scenario_dir;     // shipped scenarios for the sign/positivity sweep
  std::function<void(const CriterionResult&)> on_result;  // called as each criterion finishes
};

// One line per criterion: "PASS [id] name: detail" or "FAIL ...".
std::string format_result(const CriterionResult& r);

CriterionResult check_transition_curve(const CheckOptions& o);
CriterionResult check_demag_disk(const CheckOptions& o);
CriterionResult check_objectivity(const CheckOptions& o);
CriterionResult check_defgrad_transport(const CheckOptions& o);
CriterionResult check_energy_audit(const CheckOptions& o);
CriterionResult check_sign_positivity(const CheckOptions& o);
CriterionResult check_llg_inclusion(const CheckOptions& o);
CriterionResult check_hysteresis(const CheckOptions& o);
CriterionResult check_constitutive_gradients(const CheckOptions& o);

std::vector<CriterionResult> run_acceptance(const CheckOptions& o);

}  // namespace magnetoelast
