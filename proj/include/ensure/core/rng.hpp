#pragma once

#include "ensure/core/complex_image.hpp"

#include <cstdint>
#include <random>

namespace ensure {

// Seeded generator with independent substreams. The engine and the
// transforms below are fully specified, so a (seed, stream) pair yields the
// same sequence on every platform.
class Rng
{
public:
  Rng(std::uint64_t seed, std::uint64_t stream = 0);

  [[nodiscard]] auto seed() const -> std::uint64_t { return seed_; }
  [[nodiscard]] auto stream() const -> std::uint64_t { return stream_; }

  auto next_u64() -> std::uint64_t { return engine_(); }
  auto uniform() -> Real;                       // [0, 1)
  auto uniform(Real lo, Real hi) -> Real;       // [lo, hi)
  auto uniform_index(std::uint64_t n) -> std::uint64_t; // [0, n)
  auto normal() -> Real;                        // N(0, 1)
  auto bernoulli(Real p) -> bool;

  // A child generator whose sequence does not overlap this one's.
  [[nodiscard]] auto substream(std::uint64_t id) const -> Rng;

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  Real spare_ = 0.0;
};

// i.i.d. complex Gaussian entries with Re, Im ~ N(0, sigma^2 / 2), so that
// E|n_i|^2 = sigma^2.
auto randn_complex(Shape shape, Real sigma, Rng &rng) -> ComplexImage;

} // namespace ensure
