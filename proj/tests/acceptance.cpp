#include "magnetoelast/verification.hpp"

#include <cstring>
#include <iostream>

int main(int argc, char** argv) {
  magnetoelast::CheckOptions o;
  o.scenario_dir = MAGNETOELAST_SCENARIO_DIR;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) o.quick = true;
    else o.scenario_dir = argv[i];
  }
  o.on_result = [](const magnetoelast::CriterionResult& r) {
    std::cout << magnetoelast::format_result(r) << std::endl;
  };
  int failed = 0;
  for (const auto& r : magnetoelast::run_acceptance(o)) failed += r.passed ? 0 : 1;
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << 9 - failed << "/9" << std::endl;
  return failed ? 1 : 0;
}
