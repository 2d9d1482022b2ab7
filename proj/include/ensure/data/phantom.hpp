#pragma once

#include "ensure/core/rng.hpp"

namespace ensure {

// Piecewise-smooth complex test object: 5-12 random ellipses of random
// intensity over a smooth elliptical background, times a smooth random phase.
// Peak magnitude is 1. Both dimensions must be >= 16.
auto gen_phantom(Shape shape, Rng &rng) -> ComplexImage;

} // namespace ensure
