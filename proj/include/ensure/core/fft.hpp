#pragma once

#include "ensure/core/complex_image.hpp"

namespace ensure {

// Centered unitary 2-D DFT: k-space index (rows/2, cols/2) holds DC and
// ||fft2c(x)|| == ||x||.
auto fft2c(ComplexImage const &img) -> ComplexImage;
auto ifft2c(ComplexImage const &ksp) -> ComplexImage;

void fftshift(ComplexImage &x);
void ifftshift(ComplexImage &x);

} // namespace ensure
