#include "ensure/risk/oracles.hpp"

#include <stdexcept>

namespace ensure {

namespace {

void check(std::size_t a, std::size_t b)
{
  if (a != b || a == 0)
    throw std::invalid_argument("oracle: preds, refs and operators must be non-empty and of equal length");
}

} // namespace

auto mse(std::span<ComplexImage const> preds, std::span<ComplexImage const> refs) -> Real
{
  check(preds.size(), refs.size());
  Real acc = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    require_same_shape(preds[i].shape(), refs[i].shape(), "mse");
    acc += norm2(preds[i] - refs[i]);
  }
  return acc / Real(preds.size());
}

auto weighted_mse_oracle(std::span<ComplexImage const> preds, std::span<ComplexImage const> refs,
                         WeightingSpec const &wspec, std::span<MeasurementOperator const> ops) -> Real
{
  check(preds.size(), refs.size());
  check(preds.size(), ops.size());
  Real acc = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i)
    acc += norm2(apply_W(wspec, ops[i], preds[i] - refs[i], false));
  return acc / Real(preds.size());
}

auto projected_mse_oracle(std::span<ComplexImage const> preds, std::span<ComplexImage const> refs,
                          std::span<MeasurementOperator const> ops, SolverConfig const &cfg) -> Real
{
  check(preds.size(), refs.size());
  check(preds.size(), ops.size());
  Real acc = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i)
    acc += norm2(project_range(ops[i], preds[i] - refs[i], cfg).x);
  return acc / Real(preds.size());
}

} // namespace ensure
