#pragma once

#include "ensure/core/complex_image.hpp"

#include <limits>

namespace ensure {

// Returned by psnr() for identical magnitudes.
inline constexpr Real kPsnrIdentical = std::numeric_limits<Real>::infinity();

// 10 log10(max|ref|^2 / mean(|ref| - |img|)^2), peak taken per image.
auto psnr(ComplexImage const &ref, ComplexImage const &img) -> Real;

// Mean local SSIM of the magnitudes: 7x7 Gaussian window (sigma 1.5) over
// every position where it fits, k1 = 0.01, k2 = 0.03, L = max|ref|.
auto ssim(ComplexImage const &ref, ComplexImage const &img) -> Real;

struct MeanStd
{
  Real mean = 0.0;
  Real std = 0.0; // sample standard deviation, 0 for a single value
};

auto mean_std(std::vector<Real> const &v) -> MeanStd;

} // namespace ensure
