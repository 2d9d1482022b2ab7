#pragma once

#include "ensure/core/types.hpp"

#include <span>
#include <vector>

namespace ensure {

// Complex 2-D array, row-major. Shape is fixed at construction.
class ComplexImage
{
public:
  ComplexImage() = default;
  explicit ComplexImage(Shape shape, Cx fill = Cx{0.0, 0.0});
  ComplexImage(Shape shape, std::vector<Cx> data);

  [[nodiscard]] auto shape() const -> Shape { return shape_; }
  [[nodiscard]] auto rows() const -> Index { return shape_.rows; }
  [[nodiscard]] auto cols() const -> Index { return shape_.cols; }
  [[nodiscard]] auto size() const -> Index { return shape_.size(); }

  [[nodiscard]] auto operator()(Index r, Index c) const -> Cx const & { return data_[r * shape_.cols + c]; }
  auto operator()(Index r, Index c) -> Cx & { return data_[r * shape_.cols + c]; }
  [[nodiscard]] auto operator[](Index i) const -> Cx const & { return data_[i]; }
  auto operator[](Index i) -> Cx & { return data_[i]; }

  [[nodiscard]] auto data() const -> std::span<Cx const> { return data_; }
  auto data() -> std::span<Cx> { return data_; }
  [[nodiscard]] auto values() const -> std::vector<Cx> const & { return data_; }

  auto operator+=(ComplexImage const &o) -> ComplexImage &;
  auto operator-=(ComplexImage const &o) -> ComplexImage &;
  auto operator*=(Cx s) -> ComplexImage &;
  auto operator*=(Real s) -> ComplexImage &;

  // this += s * o
  void axpy(Real s, ComplexImage const &o);

  void set_zero();
  [[nodiscard]] auto all_finite() const -> bool;

  auto operator==(ComplexImage const &) const -> bool = default;

private:
  Shape shape_{};
  std::vector<Cx> data_;
};

auto operator+(ComplexImage a, ComplexImage const &b) -> ComplexImage;
auto operator-(ComplexImage a, ComplexImage const &b) -> ComplexImage;
auto operator*(Real s, ComplexImage a) -> ComplexImage;
auto operator*(Cx s, ComplexImage a) -> ComplexImage;

// Complex inner product sum(conj(a) * b).
auto inner(ComplexImage const &a, ComplexImage const &b) -> Cx;
// Re(inner(a, b)): the Euclidean inner product of the real-stacked vectors.
auto real_inner(ComplexImage const &a, ComplexImage const &b) -> Real;
auto norm2(ComplexImage const &a) -> Real; // squared Euclidean norm
auto norm(ComplexImage const &a) -> Real;
auto hadamard(ComplexImage a, ComplexImage const &b) -> ComplexImage;
auto conj(ComplexImage a) -> ComplexImage;
auto magnitude(ComplexImage const &a) -> std::vector<Real>;
auto rms(ComplexImage const &a) -> Real;

void require_finite(ComplexImage const &a, char const *what);

} // namespace ensure
