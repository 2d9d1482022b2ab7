#include "ensure/data/phantom.hpp"

#include <cmath>
#include <numbers>

namespace ensure {

namespace {

struct Ellipse
{
  Real cx, cy, a, b, cos_t, sin_t, value;

  // signed "radius": < 1 inside
  [[nodiscard]] auto radius(Real x, Real y) const -> Real
  {
    Real const dx = x - cx, dy = y - cy;
    Real const u = (dx * cos_t + dy * sin_t) / a;
    Real const v = (-dx * sin_t + dy * cos_t) / b;
    return std::sqrt(u * u + v * v);
  }
};

auto random_ellipse(Rng &rng, Real max_r) -> Ellipse
{
  Real const t = rng.uniform(0.0, std::numbers::pi);
  Ellipse e{};
  e.cx = rng.uniform(-0.5, 0.5);
  e.cy = rng.uniform(-0.5, 0.5);
  e.a = rng.uniform(0.06, max_r);
  e.b = rng.uniform(0.06, max_r);
  e.cos_t = std::cos(t);
  e.sin_t = std::sin(t);
  e.value = rng.uniform(-0.6, 0.8);
  return e;
}

} // namespace

auto gen_phantom(Shape shape, Rng &rng) -> ComplexImage
{
  if (shape.rows < 16 || shape.cols < 16)
    throw ShapeError("gen_phantom: shape must be at least 16x16, got " + to_string(shape));

  // background: a large ellipse with a gentle linear ramp
  Ellipse body{rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05), rng.uniform(0.7, 0.85), rng.uniform(0.6, 0.8),
               1.0, 0.0, 0.0};
  Real const gx = rng.uniform(-0.2, 0.2), gy = rng.uniform(-0.2, 0.2);
  Real const base = rng.uniform(0.3, 0.5);

  int const n_ell = 5 + int(rng.uniform_index(8));
  std::vector<Ellipse> ells;
  for (int k = 0; k < n_ell; ++k)
    ells.push_back(random_ellipse(rng, 0.35));

  // phase: low-order polynomial, at most about +-pi/2
  Real const p0 = rng.uniform(-std::numbers::pi, std::numbers::pi);
  Real const px = rng.uniform(-1.0, 1.0), py = rng.uniform(-1.0, 1.0), pxy = rng.uniform(-0.5, 0.5);

  ComplexImage img(shape);
  Real peak = 0.0;
  for (Index r = 0; r < shape.rows; ++r) {
    Real const y = 2.0 * (Real(r) + 0.5) / Real(shape.rows) - 1.0;
    for (Index c = 0; c < shape.cols; ++c) {
      Real const x = 2.0 * (Real(c) + 0.5) / Real(shape.cols) - 1.0;
      Real m = 0.0;
      if (body.radius(x, y) < 1.0) {
        m = base * (1.0 + gx * x + gy * y);
        for (auto const &e : ells) {
          Real const rr = e.radius(x, y);
          if (rr < 1.0)
            m += e.value * (1.0 - 0.3 * rr * rr); // smooth inside, sharp edge
        }
      }
      m = std::abs(m);
      Real const ph = p0 + px * x + py * y + pxy * x * y;
      img(r, c) = std::polar(m, ph);
      peak = std::max(peak, m);
    }
  }
  if (peak <= 0.0)
    throw std::logic_error("gen_phantom: empty phantom");
  img *= 1.0 / peak;
  return img;
}

} // namespace ensure
