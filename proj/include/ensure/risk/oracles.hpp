#pragma once

#include "ensure/solvers/projections.hpp"

#include <span>

namespace ensure {

// Reference-holding risks, for verification only. Both are means over the
// samples.

// ||W (pred - ref)||^2 with the closed-form W; single-channel operators only.
auto weighted_mse_oracle(std::span<ComplexImage const> preds, std::span<ComplexImage const> refs,
                         WeightingSpec const &wspec, std::span<MeasurementOperator const> ops) -> Real;

// ||P_s (pred - ref)||^2
auto projected_mse_oracle(std::span<ComplexImage const> preds, std::span<ComplexImage const> refs,
                          std::span<MeasurementOperator const> ops, SolverConfig const &cfg = {}) -> Real;

auto mse(std::span<ComplexImage const> preds, std::span<ComplexImage const> refs) -> Real;

} // namespace ensure
