// One line per acceptance criterion; exit status 0 iff every criterion passes.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "tdho/verify.hpp"

int main(int argc, char** argv) {
  tdho::VerifyOptions options;
  std::vector<int> ids = tdho::all_criteria();
  if (argc > 1) {
    ids.clear();
    for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  }
  bool ok = true;
  for (int id : ids) {
    const tdho::CriterionResult r = tdho::run_criterion(id, options);
    ok = ok && r.passed;
    std::printf("%s criterion %d (%s): value %.3e threshold %.1e, %.2f s%s%s\n", r.passed ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.value, r.threshold, r.seconds, r.detail.empty() ? "" : " -- ", r.detail.c_str());
    std::fflush(stdout);
  }
  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
