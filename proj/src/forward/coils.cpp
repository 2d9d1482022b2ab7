#include "ensure/forward/coils.hpp"

#include <cmath>
#include <numbers>

namespace ensure {

void normalize_sum_of_squares(CoilMaps &coils)
{
  if (coils.maps.empty()) { return; }
  Index const n = coils.maps.front().size();
  for (Index i = 0; i < n; i++) {
    Real ss = 0.0;
    for (auto const &c : coils.maps) { ss += std::norm(c[i]); }
    Real const inv = ss > 0.0 ? 1.0 / std::sqrt(ss) : 0.0;
    for (auto &c : coils.maps) { c[i] *= inv; }
  }
}

auto simulate_coils(Index n_coils, Shape shape, Rng &rng) -> CoilMaps
{
  if (n_coils < 1) { throw std::invalid_argument("simulate_coils: need at least one coil"); }
  Real const R = static_cast<Real>(shape.rows);
  Real const C = static_cast<Real>(shape.cols);
  Real const span = std::max(R, C);
  Real const ring = 0.6 * span;
  Real const width = 0.6 * span;
  Real const phase0 = rng.uniform(0.0, 2.0 * std::numbers::pi);

  CoilMaps out;
  for (Index j = 0; j < n_coils; j++) {
    Real const angle = phase0 + 2.0 * std::numbers::pi * static_cast<Real>(j) / static_cast<Real>(n_coils);
    Real const cy = R / 2.0 + ring * std::sin(angle);
    Real const cx = C / 2.0 + ring * std::cos(angle);
    Real const slope_y = rng.uniform(-0.5, 0.5) * std::numbers::pi / R;
    Real const slope_x = rng.uniform(-0.5, 0.5) * std::numbers::pi / C;
    Real const offset = rng.uniform(0.0, 2.0 * std::numbers::pi);
    ComplexImage map(shape);
    for (Index r = 0; r < shape.rows; r++) {
      for (Index c = 0; c < shape.cols; c++) {
        Real const dy = static_cast<Real>(r) - cy;
        Real const dx = static_cast<Real>(c) - cx;
        Real const mag = std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
        Real const ph = offset + slope_y * static_cast<Real>(r) + slope_x * static_cast<Real>(c);
        map(r, c) = std::polar(mag, ph);
      }
    }
    out.maps.push_back(std::move(map));
  }
  normalize_sum_of_squares(out);
  return out;
}

auto max_finite_difference(CoilMaps const &coils) -> Real
{
  Real worst = 0.0;
  for (auto const &m : coils.maps) {
    for (Index r = 0; r < m.rows(); r++) {
      for (Index c = 0; c < m.cols(); c++) {
        if (r + 1 < m.rows()) { worst = std::max(worst, std::abs(m(r + 1, c) - m(r, c))); }
        if (c + 1 < m.cols()) { worst = std::max(worst, std::abs(m(r, c + 1) - m(r, c))); }
      }
    }
  }
  return worst;
}

} // namespace ensure
