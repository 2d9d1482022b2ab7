#include "ensure/core/linear_operator.hpp"

#include <algorithm>
#include <cmath>

namespace ensure {

namespace {

auto random_vector(Index n, Rng &rng) -> CxVector
{
  CxVector v(static_cast<std::size_t>(n));
  for (auto &x : v) {
    Real const re = rng.normal();
    Real const im = rng.normal();
    x = Cx{re, im};
  }
  return v;
}

auto dot(CxVector const &a, CxVector const &b) -> Cx
{
  Cx acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); i++) { acc += std::conj(a[i]) * b[i]; }
  return acc;
}

auto vnorm(CxVector const &a) -> Real
{
  Real acc = 0.0;
  for (auto const &x : a) { acc += std::norm(x); }
  return std::sqrt(acc);
}

} // namespace

auto adjoint_check(LinearOperatorContract const &op, int trials, Rng &rng) -> Real
{
  if (trials < 1) { throw std::invalid_argument("adjoint_check: trials must be >= 1"); }
  Real worst = 0.0;
  for (int t = 0; t < trials; t++) {
    auto const x = random_vector(op.domain_size, rng);
    auto const y = random_vector(op.range_size, rng);
    auto const Ax = op.apply(x);
    auto const AHy = op.adjoint(y);
    if (static_cast<Index>(Ax.size()) != op.range_size || static_cast<Index>(AHy.size()) != op.domain_size) {
      throw ShapeError("adjoint_check: operator output size differs from declared shape");
    }
    Real const scale = vnorm(x) * vnorm(y);
    Real const gap = std::abs(dot(Ax, y) - dot(x, AHy));
    worst = std::max(worst, scale > 0.0 ? gap / scale : gap);
  }
  return worst;
}

auto identity_contract(Index n) -> LinearOperatorContract
{
  return LinearOperatorContract{
    .domain_size = n,
    .range_size = n,
    .apply = [](CxVector const &x) { return x; },
    .adjoint = [](CxVector const &y) { return y; },
  };
}

} // namespace ensure
