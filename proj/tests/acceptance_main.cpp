// One line per acceptance criterion; exit status 0 iff all pass.

#include <cstdio>

#include "friable/acceptance.hpp"

int main(int argc, char** argv) {
  using namespace friable::acceptance;
  Tolerances tol;
  if (argc > 1) tol = load_tolerances(argv[1]);
  int failed = 0;
  run_suite("all", tol, [&](const CriterionResult& r) {
    std::printf("%s\n", format_result(r).c_str());
    std::fflush(stdout);
    failed += !r.passed;
  });
  std::printf("%s: %d of 12 criteria failed\n", failed ? "FAIL" : "PASS", failed);
  return failed ? 1 : 0;
}
