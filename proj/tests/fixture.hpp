#pragma once

// Shared n=6 setting: critical instance from seed 1, code seed 7.
#include "nashlab/brouwer.hpp"
#include "nashlab/embed.hpp"
#include "nashlab/profile.hpp"

namespace nashlab::testing {

struct Six {
  ConstantsProfile profile = ConstantsProfile::desk();
  EolInstance inst;
  VertexCode code;
  BrouwerField field;
  EolSolution solution;
};

inline EolInstance six_instance() {
  Rng rng = make_rng(1, "instance");
  return sample_critical(64, rng);
}

inline const Six& six() {
  static const Six s = [] {
    auto prof = ConstantsProfile::desk();
    auto inst = six_instance();
    auto code = VertexCode::build(6, 2, 7, prof);
    auto sols = enumerate_solutions(inst);
    return Six{prof, inst, code, BrouwerField(inst, code, prof), sols.at(0)};
  }();
  return s;
}

}  // namespace nashlab::testing
