#pragma once

#include "ensure/core/rng.hpp"

#include <functional>
#include <vector>

namespace ensure {

using CxVector = std::vector<Cx>;

// Type-erased linear map between flat complex vectors, used to validate
// every operator in the codebase against its adjoint.
struct LinearOperatorContract
{
  Index domain_size = 0;
  Index range_size = 0;
  std::function<CxVector(CxVector const &)> apply;
  std::function<CxVector(CxVector const &)> adjoint;
};

// max over trials of |<Ax, y> - <x, A^H y>| / (||x|| ||y||) for random
// complex Gaussian x and y.
auto adjoint_check(LinearOperatorContract const &op, int trials, Rng &rng) -> Real;

auto identity_contract(Index n) -> LinearOperatorContract;

} // namespace ensure
