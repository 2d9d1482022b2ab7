#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ensure {

using Real = double;
using Cx = std::complex<double>;
using Index = std::int64_t;

struct Shape
{
  Index rows = 0;
  Index cols = 0;

  [[nodiscard]] constexpr auto size() const -> Index { return rows * cols; }
  constexpr auto operator==(Shape const &) const -> bool = default;
};

auto to_string(Shape const &s) -> std::string;

// Thrown when two arrays that must agree in shape do not.
struct ShapeError : std::invalid_argument
{
  using std::invalid_argument::invalid_argument;
};

// Thrown when an operation produces or receives NaN/Inf.
struct NonFiniteError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

void require_same_shape(Shape const &a, Shape const &b, char const *what);

} // namespace ensure
