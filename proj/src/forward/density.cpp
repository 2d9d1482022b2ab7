#include "ensure/forward/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ensure {

auto to_string(DensityKind k) -> std::string
{
  switch (k) {
  case DensityKind::Uniform: return "uniform";
  case DensityKind::GaussianVardens: return "gaussian-vardens";
  case DensityKind::CartesianLines: return "cartesian-lines";
  }
  return "unknown";
}

auto parse_density_kind(std::string const &s) -> DensityKind
{
  if (s == "uniform") { return DensityKind::Uniform; }
  if (s == "gaussian-vardens") { return DensityKind::GaussianVardens; }
  if (s == "cartesian-lines") { return DensityKind::CartesianLines; }
  throw std::invalid_argument("unknown density kind '" + s + "'");
}

DensityMap::DensityMap(DensityKind kind, Shape shape, std::vector<Real> values, Real target_acceleration)
  : kind_{kind}
  , shape_{shape}
  , d_{std::move(values)}
  , accel_{target_acceleration}
{
  if (static_cast<Index>(d_.size()) != shape.size()) { throw ShapeError("DensityMap: value count does not match shape"); }
  for (auto v : d_) {
    if (!(v > 0.0) || v > 1.0) { throw std::invalid_argument("DensityMap: probabilities must lie in (0, 1]"); }
  }
}

auto DensityMap::from_values(Shape shape, std::vector<Real> values, DensityKind kind) -> DensityMap
{
  Real const m = values.empty() ? 1.0 : std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  return DensityMap(kind, shape, std::move(values), m > 0.0 ? 1.0 / m : 0.0);
}

auto DensityMap::mean() const -> Real
{
  return std::accumulate(d_.begin(), d_.end(), 0.0) / static_cast<Real>(d_.size());
}

auto DensityMap::min() const -> Real
{
  return *std::min_element(d_.begin(), d_.end());
}

namespace {

// Normalized squared k-space radius; the centre bin (n/2) maps to zero.
auto axis_coord(Index i, Index n) -> Real
{
  Real const half = std::max<Real>(static_cast<Real>(n) / 2.0, 1.0);
  return (static_cast<Real>(i) - static_cast<Real>(n / 2)) / half;
}

auto profile(DensityKind kind, Shape shape) -> std::vector<Real>
{
  // Widths chosen so the calibrated maps keep a fully sampled centre at the
  // accelerations of interest (2x to 8x).
  Real const width = kind == DensityKind::CartesianLines ? 0.15 : 0.3;
  std::vector<Real> g(static_cast<std::size_t>(shape.size()));
  for (Index r = 0; r < shape.rows; r++) {
    for (Index c = 0; c < shape.cols; c++) {
      Real const kc = axis_coord(c, shape.cols);
      Real r2 = kc * kc;
      if (kind == DensityKind::GaussianVardens) {
        Real const kr = axis_coord(r, shape.rows);
        r2 += kr * kr;
      }
      g[r * shape.cols + c] = std::exp(-r2 / (2.0 * width * width));
    }
  }
  return g;
}

auto offset_density(std::vector<Real> const &g, Real t) -> std::vector<Real>
{
  std::vector<Real> d(g.size());
  for (std::size_t i = 0; i < g.size(); i++) { d[i] = std::clamp(g[i] + t, kDensityFloor, 1.0); }
  return d;
}

auto mean_of(std::vector<Real> const &v) -> Real
{
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<Real>(v.size());
}

} // namespace

auto make_density(DensityKind kind, Shape shape, Real target_acceleration) -> DensityMap
{
  if (!(target_acceleration > 1.0)) { throw std::invalid_argument("make_density: acceleration must exceed 1"); }
  if (shape.size() <= 0) { throw ShapeError("make_density: empty shape"); }
  Real const target = 1.0 / target_acceleration;
  if (target <= kDensityFloor) {
    throw std::invalid_argument("make_density: acceleration too high, density would fall below the floor everywhere");
  }

  if (kind == DensityKind::Uniform) {
    return DensityMap(kind, shape, std::vector<Real>(static_cast<std::size_t>(shape.size()), target), target_acceleration);
  }

  // mean(offset_density(g, t)) is continuous and non-decreasing in t, and
  // spans [d_min, 1] on t in [-1, 1].
  auto const g = profile(kind, shape);
  Real lo = -1.0;
  Real hi = 1.0;
  for (int it = 0; it < 200; it++) {
    Real const mid = 0.5 * (lo + hi);
    if (mean_of(offset_density(g, mid)) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  auto d = offset_density(g, 0.5 * (lo + hi));
  if (std::abs(mean_of(d) - target) > 1e-9) {
    throw std::runtime_error("make_density: calibration did not reach the target mean");
  }
  return DensityMap(kind, shape, std::move(d), target_acceleration);
}

} // namespace ensure
