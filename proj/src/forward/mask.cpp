#include "ensure/forward/mask.hpp"

#include <algorithm>

namespace ensure {

SamplingMask::SamplingMask(Shape shape, std::vector<std::uint8_t> bits)
  : shape_{shape}
  , m_{std::move(bits)}
{
  if (static_cast<Index>(m_.size()) != shape.size()) { throw ShapeError("SamplingMask: bit count does not match shape"); }
  for (auto &b : m_) { b = b ? 1 : 0; }
}

auto SamplingMask::full(Shape shape) -> SamplingMask
{
  return SamplingMask(shape, std::vector<std::uint8_t>(static_cast<std::size_t>(shape.size()), 1));
}

auto SamplingMask::count() const -> Index
{
  return static_cast<Index>(std::count(m_.begin(), m_.end(), std::uint8_t{1}));
}

auto SamplingMask::fraction() const -> Real
{
  return m_.empty() ? 0.0 : static_cast<Real>(count()) / static_cast<Real>(m_.size());
}

auto SamplingMask::columns_constant() const -> bool
{
  for (Index c = 0; c < shape_.cols; c++) {
    for (Index r = 1; r < shape_.rows; r++) {
      if (m_[r * shape_.cols + c] != m_[c]) { return false; }
    }
  }
  return true;
}

auto SamplingMask::sampled_indices() const -> std::vector<Index>
{
  std::vector<Index> idx;
  for (Index i = 0; i < static_cast<Index>(m_.size()); i++) {
    if (m_[i]) { idx.push_back(i); }
  }
  return idx;
}

auto sample_mask(DensityMap const &density, Rng &rng) -> SamplingMask
{
  Shape const s = density.shape();
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(s.size()), 0);
  while (true) {
    if (density.kind() == DensityKind::CartesianLines) {
      for (Index c = 0; c < s.cols; c++) {
        std::uint8_t const on = rng.bernoulli(density(0, c)) ? 1 : 0;
        for (Index r = 0; r < s.rows; r++) { bits[r * s.cols + c] = on; }
      }
    } else {
      for (Index i = 0; i < s.size(); i++) { bits[i] = rng.bernoulli(density[i]) ? 1 : 0; }
    }
    if (std::find(bits.begin(), bits.end(), std::uint8_t{1}) != bits.end()) { break; }
  }
  return SamplingMask(s, std::move(bits));
}

auto MaskEnsemble::at(Index id) const -> SamplingMask const &
{
  if (single && !masks.empty()) { return masks.front(); }
  if (id < 0 || id >= size()) { throw std::out_of_range("MaskEnsemble: mask id " + std::to_string(id) + " out of range"); }
  return masks[static_cast<std::size_t>(id)];
}

auto make_ensemble(DensityMap density, Index count, std::uint64_t seed, bool single_mask) -> MaskEnsemble
{
  if (count < 1) { throw std::invalid_argument("make_ensemble: need at least one mask"); }
  Rng rng(seed, 0x6d61736bULL);
  MaskEnsemble e{std::move(density), {}, seed, single_mask};
  Index const n = single_mask ? 1 : count;
  e.masks.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; i++) { e.masks.push_back(sample_mask(e.density, rng)); }
  return e;
}

} // namespace ensure
