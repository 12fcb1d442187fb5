// Runs all nine acceptance criteria; one line each, exit 1 on any failure.
#include <iostream>

#include "nashlab/acceptance.hpp"
#include "nashlab/pipeline.hpp"

int main(int argc, char** argv) {
  nashlab::AcceptanceOptions opt;
  if (argc > 1) opt.seed = std::stoull(argv[1]);
  opt.profile = nashlab::resolve_profile("desk");
  int failed = 0;
  nashlab::run_acceptance(opt, [&](const nashlab::CriterionResult& r) {
    std::cout << nashlab::format_result(r) << std::endl;
    if (!r.pass) ++failed;
  });
  std::cout << (failed ? "acceptance: " + std::to_string(failed) + " failing" : "acceptance: all pass")
            << std::endl;
  return failed ? 1 : 0;
}
