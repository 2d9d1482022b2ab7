#include "ensure/metrics/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace ensure {

namespace {

auto peak(std::vector<Real> const &m) -> Real { return *std::max_element(m.begin(), m.end()); }

constexpr int kWin = 7;

auto gaussian_window() -> std::array<Real, kWin>
{
  std::array<Real, kWin> w{};
  Real s = 0.0;
  for (int i = 0; i < kWin; ++i) {
    Real const x = i - kWin / 2;
    w[i] = std::exp(-x * x / (2 * 1.5 * 1.5));
    s += w[i];
  }
  for (auto &v : w)
    v /= s;
  return w;
}

// Separable weighted sum over the window anchored at each valid position.
auto filter_valid(std::vector<Real> const &a, Index rows, Index cols, std::array<Real, kWin> const &w)
  -> std::vector<Real>
{
  Index const orow = rows - kWin + 1, ocol = cols - kWin + 1;
  std::vector<Real> tmp(rows * ocol, 0.0);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < ocol; ++c) {
      Real s = 0.0;
      for (int k = 0; k < kWin; ++k)
        s += w[k] * a[r * cols + c + k];
      tmp[r * ocol + c] = s;
    }
  std::vector<Real> out(orow * ocol, 0.0);
  for (Index r = 0; r < orow; ++r)
    for (Index c = 0; c < ocol; ++c) {
      Real s = 0.0;
      for (int k = 0; k < kWin; ++k)
        s += w[k] * tmp[(r + k) * ocol + c];
      out[r * ocol + c] = s;
    }
  return out;
}

} // namespace

auto psnr(ComplexImage const &ref, ComplexImage const &img) -> Real
{
  require_same_shape(ref.shape(), img.shape(), "psnr");
  auto const a = magnitude(ref), b = magnitude(img);
  Real const p = peak(a);
  if (!(p > 0.0))
    throw std::invalid_argument("psnr: reference image is all zero");
  Real mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    mse += (a[i] - b[i]) * (a[i] - b[i]);
  mse /= Real(a.size());
  if (mse == 0.0)
    return kPsnrIdentical;
  return 10.0 * std::log10(p * p / mse);
}

auto ssim(ComplexImage const &ref, ComplexImage const &img) -> Real
{
  require_same_shape(ref.shape(), img.shape(), "ssim");
  if (ref.rows() < kWin || ref.cols() < kWin)
    throw ShapeError("ssim: image smaller than the 7x7 window");
  auto const x = magnitude(ref), y = magnitude(img);
  Real const L = peak(x);
  if (!(L > 0.0))
    throw std::invalid_argument("ssim: reference image is all zero");
  Real const c1 = (0.01 * L) * (0.01 * L), c2 = (0.03 * L) * (0.03 * L);

  auto const w = gaussian_window();
  Index const R = ref.rows(), C = ref.cols();
  std::vector<Real> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  auto const mx = filter_valid(x, R, C, w), my = filter_valid(y, R, C, w);
  auto const sxx = filter_valid(xx, R, C, w), syy = filter_valid(yy, R, C, w), sxy = filter_valid(xy, R, C, w);

  Real acc = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    Real const vx = sxx[i] - mx[i] * mx[i];
    Real const vy = syy[i] - my[i] * my[i];
    Real const cv = sxy[i] - mx[i] * my[i];
    Real const s = ((2 * mx[i] * my[i] + c1) * (2 * cv + c2)) /
                   ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    acc += s;
  }
  return std::clamp(acc / Real(mx.size()), -1.0, 1.0);
}

auto mean_std(std::vector<Real> const &v) -> MeanStd
{
  if (v.empty())
    throw std::invalid_argument("mean_std: no values");
  MeanStd out;
  for (Real x : v)
    out.mean += x;
  out.mean /= Real(v.size());
  if (v.size() > 1) {
    Real s = 0.0;
    for (Real x : v)
      s += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(s / Real(v.size() - 1));
  }
  return out;
}

} // namespace ensure
