#pragma once

#include "ensure/core/complex_image.hpp"
#include "ensure/core/rng.hpp"

#include <vector>

namespace ensure {

// Coil sensitivities, normalized so sum_j |c_j(x)|^2 = 1 at every pixel.
struct CoilMaps
{
  std::vector<ComplexImage> maps;

  [[nodiscard]] auto n_coils() const -> Index { return static_cast<Index>(maps.size()); }
  [[nodiscard]] auto shape() const -> Shape { return maps.empty() ? Shape{} : maps.front().shape(); }
};

void normalize_sum_of_squares(CoilMaps &coils);

// Smooth synthetic sensitivities: Gaussian magnitude bumps centred on a ring
// around the field of view, with low-order (planar) phase.
auto simulate_coils(Index n_coils, Shape shape, Rng &rng) -> CoilMaps;

// Largest |c(x+1) - c(x)| over both axes and all coils.
auto max_finite_difference(CoilMaps const &coils) -> Real;

} // namespace ensure
