#pragma once

#include "ensure/core/rng.hpp"
#include "ensure/forward/density.hpp"

#include <cstdint>
#include <vector>

namespace ensure {

class SamplingMask
{
public:
  SamplingMask() = default;
  SamplingMask(Shape shape, std::vector<std::uint8_t> bits);

  static auto full(Shape shape) -> SamplingMask;

  [[nodiscard]] auto shape() const -> Shape { return shape_; }
  [[nodiscard]] auto bits() const -> std::vector<std::uint8_t> const & { return m_; }
  [[nodiscard]] auto operator[](Index i) const -> bool { return m_[i] != 0; }
  [[nodiscard]] auto operator()(Index r, Index c) const -> bool { return m_[r * shape_.cols + c] != 0; }
  [[nodiscard]] auto count() const -> Index;
  [[nodiscard]] auto fraction() const -> Real;
  [[nodiscard]] auto columns_constant() const -> bool;
  [[nodiscard]] auto sampled_indices() const -> std::vector<Index>;

  auto operator==(SamplingMask const &) const -> bool = default;

private:
  Shape shape_{};
  std::vector<std::uint8_t> m_;
};

// m_i ~ Bernoulli(d_i) (one draw per column for cartesian-lines). An all-zero
// draw is discarded and redrawn.
auto sample_mask(DensityMap const &density, Rng &rng) -> SamplingMask;

// The lookup table of masks a dataset draws from.
struct MaskEnsemble
{
  DensityMap density;
  std::vector<SamplingMask> masks;
  std::uint64_t seed = 0;
  bool single = false; // one shared mask (GSURE configuration)

  [[nodiscard]] auto size() const -> Index { return static_cast<Index>(masks.size()); }
  [[nodiscard]] auto at(Index id) const -> SamplingMask const &;
};

auto make_ensemble(DensityMap density, Index count, std::uint64_t seed, bool single_mask) -> MaskEnsemble;

} // namespace ensure
