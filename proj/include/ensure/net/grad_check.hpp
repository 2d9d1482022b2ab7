#pragma once

#include "ensure/net/objectives.hpp"

namespace ensure {

struct GradCheckReport
{
  std::string loss;
  Real max_rel_error = 0.0;
  Real tol = 1e-4;
  int n_checked = 0;
  bool pass = false;
};

// Tape gradient against central differences on a random subset of
// parameters (all of them if n_params <= 0). The divergence probe is
// re-seeded for every evaluation, so the objective is deterministic. A
// component's error is |g - fd| / max(|g|, |fd|, 1e-3 max_k |g_k|): relative
// for significant components, absolute at the gradient's scale otherwise.
auto grad_check(ReconNetwork const &net, TrainingSample const &sample, ObjectiveConfig const &obj, Real tol = 1e-4,
                int n_params = 32, std::uint64_t seed = 0, Real step = 1e-3) -> GradCheckReport;

} // namespace ensure
