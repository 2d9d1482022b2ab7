#pragma once

#include "ensure/core/types.hpp"

#include <string>
#include <vector>

namespace ensure {

enum class DensityKind
{
  Uniform,
  GaussianVardens,
  CartesianLines,
};

auto to_string(DensityKind k) -> std::string;
auto parse_density_kind(std::string const &s) -> DensityKind;

inline constexpr Real kDensityFloor = 1e-3;

// Per-location Bernoulli sampling probabilities over k-space. Values lie in
// [kDensityFloor, 1]. For CartesianLines the probability depends only on the
// column (phase-encode) index.
class DensityMap
{
public:
  DensityMap(DensityKind kind, Shape shape, std::vector<Real> values, Real target_acceleration);

  // Arbitrary density, e.g. d = 1 for full sampling. Values are validated,
  // not clamped.
  static auto from_values(Shape shape, std::vector<Real> values, DensityKind kind = DensityKind::Uniform)
    -> DensityMap;

  [[nodiscard]] auto kind() const -> DensityKind { return kind_; }
  [[nodiscard]] auto shape() const -> Shape { return shape_; }
  [[nodiscard]] auto values() const -> std::vector<Real> const & { return d_; }
  [[nodiscard]] auto operator[](Index i) const -> Real { return d_[i]; }
  [[nodiscard]] auto operator()(Index r, Index c) const -> Real { return d_[r * shape_.cols + c]; }
  [[nodiscard]] auto target_acceleration() const -> Real { return accel_; }
  [[nodiscard]] auto mean() const -> Real;
  [[nodiscard]] auto min() const -> Real;

private:
  DensityKind kind_;
  Shape shape_;
  std::vector<Real> d_;
  Real accel_;
};

// Calibrated so mean(d) == 1 / target_acceleration. gaussian-vardens and
// cartesian-lines use d = clamp(exp(-r^2 / (2 w^2)) + t, d_min, 1) with the
// offset t found by bisection.
auto make_density(DensityKind kind, Shape shape, Real target_acceleration) -> DensityMap;

} // namespace ensure
