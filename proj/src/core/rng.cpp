#include "ensure/core/rng.hpp"

#include <cmath>
#include <numbers>

namespace ensure {

namespace {

auto splitmix64(std::uint64_t &state) -> std::uint64_t
{
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

auto make_engine(std::uint64_t seed, std::uint64_t stream) -> std::mt19937_64
{
  std::uint64_t s = seed;
  std::uint64_t t = stream ^ 0xD1B54A32D192ED03ULL;
  std::seed_seq seq{
    static_cast<std::uint32_t>(splitmix64(s)),
    static_cast<std::uint32_t>(splitmix64(s) >> 32),
    static_cast<std::uint32_t>(splitmix64(t)),
    static_cast<std::uint32_t>(splitmix64(t) >> 32),
    static_cast<std::uint32_t>(seed),
    static_cast<std::uint32_t>(seed >> 32),
    static_cast<std::uint32_t>(stream),
    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

} // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
  : seed_{seed}
  , stream_{stream}
  , engine_{make_engine(seed, stream)}
{
}

auto Rng::uniform() -> Real
{
  return static_cast<Real>(engine_() >> 11) * 0x1.0p-53;
}

auto Rng::uniform(Real lo, Real hi) -> Real
{
  return lo + (hi - lo) * uniform();
}

auto Rng::uniform_index(std::uint64_t n) -> std::uint64_t
{
  if (n == 0) { return 0; }
  // Rejection sampling keeps the draw exactly uniform.
  std::uint64_t const limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v = engine_();
  while (v >= limit) { v = engine_(); }
  return v % n;
}

auto Rng::normal() -> Real
{
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; 1 - uniform() lies in (0, 1] so the log is finite.
  Real const u1 = 1.0 - uniform();
  Real const u2 = uniform();
  Real const r = std::sqrt(-2.0 * std::log(u1));
  Real const theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

auto Rng::bernoulli(Real p) -> bool
{
  return uniform() < p;
}

auto Rng::substream(std::uint64_t id) const -> Rng
{
  std::uint64_t s = stream_ * 0x100000001B3ULL + id + 1;
  return Rng(seed_, splitmix64(s));
}

auto randn_complex(Shape shape, Real sigma, Rng &rng) -> ComplexImage
{
  ComplexImage out(shape);
  if (sigma == 0.0) { return out; }
  Real const s = sigma / std::sqrt(2.0);
  for (auto &v : out.data()) {
    Real const re = rng.normal();
    Real const im = rng.normal();
    v = Cx{s * re, s * im};
  }
  return out;
}

} // namespace ensure
