#include "ensure/core/complex_image.hpp"

#include <cmath>
#include <sstream>

namespace ensure {

auto to_string(Shape const &s) -> std::string
{
  std::ostringstream os;
  os << s.rows << "x" << s.cols;
  return os.str();
}

void require_same_shape(Shape const &a, Shape const &b, char const *what)
{
  if (a != b) {
    throw ShapeError(std::string(what) + ": shape mismatch " + to_string(a) + " vs " + to_string(b));
  }
}

ComplexImage::ComplexImage(Shape shape, Cx fill)
  : shape_{shape}
  , data_(static_cast<std::size_t>(shape.size()), fill)
{
  if (shape.rows < 0 || shape.cols < 0) { throw ShapeError("negative image shape"); }
}

ComplexImage::ComplexImage(Shape shape, std::vector<Cx> data)
  : shape_{shape}
  , data_{std::move(data)}
{
  if (static_cast<Index>(data_.size()) != shape.size()) {
    throw ShapeError("ComplexImage: data length does not match shape " + to_string(shape));
  }
}

auto ComplexImage::operator+=(ComplexImage const &o) -> ComplexImage &
{
  require_same_shape(shape_, o.shape_, "operator+=");
  for (std::size_t i = 0; i < data_.size(); i++) { data_[i] += o.data_[i]; }
  return *this;
}

auto ComplexImage::operator-=(ComplexImage const &o) -> ComplexImage &
{
  require_same_shape(shape_, o.shape_, "operator-=");
  for (std::size_t i = 0; i < data_.size(); i++) { data_[i] -= o.data_[i]; }
  return *this;
}

auto ComplexImage::operator*=(Cx s) -> ComplexImage &
{
  for (auto &v : data_) { v *= s; }
  return *this;
}

auto ComplexImage::operator*=(Real s) -> ComplexImage &
{
  for (auto &v : data_) { v *= s; }
  return *this;
}

void ComplexImage::axpy(Real s, ComplexImage const &o)
{
  require_same_shape(shape_, o.shape_, "axpy");
  for (std::size_t i = 0; i < data_.size(); i++) { data_[i] += s * o.data_[i]; }
}

void ComplexImage::set_zero()
{
  std::fill(data_.begin(), data_.end(), Cx{0.0, 0.0});
}

auto ComplexImage::all_finite() const -> bool
{
  for (auto const &v : data_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) { return false; }
  }
  return true;
}

auto operator+(ComplexImage a, ComplexImage const &b) -> ComplexImage
{
  a += b;
  return a;
}

auto operator-(ComplexImage a, ComplexImage const &b) -> ComplexImage
{
  a -= b;
  return a;
}

auto operator*(Real s, ComplexImage a) -> ComplexImage
{
  a *= s;
  return a;
}

auto operator*(Cx s, ComplexImage a) -> ComplexImage
{
  a *= s;
  return a;
}

auto inner(ComplexImage const &a, ComplexImage const &b) -> Cx
{
  require_same_shape(a.shape(), b.shape(), "inner");
  Cx acc{0.0, 0.0};
  for (Index i = 0; i < a.size(); i++) { acc += std::conj(a[i]) * b[i]; }
  return acc;
}

auto real_inner(ComplexImage const &a, ComplexImage const &b) -> Real
{
  require_same_shape(a.shape(), b.shape(), "real_inner");
  Real acc = 0.0;
  for (Index i = 0; i < a.size(); i++) { acc += a[i].real() * b[i].real() + a[i].imag() * b[i].imag(); }
  return acc;
}

auto norm2(ComplexImage const &a) -> Real
{
  Real acc = 0.0;
  for (auto const &v : a.data()) { acc += std::norm(v); }
  return acc;
}

auto norm(ComplexImage const &a) -> Real
{
  return std::sqrt(norm2(a));
}

auto hadamard(ComplexImage a, ComplexImage const &b) -> ComplexImage
{
  require_same_shape(a.shape(), b.shape(), "hadamard");
  for (Index i = 0; i < a.size(); i++) { a[i] *= b[i]; }
  return a;
}

auto conj(ComplexImage a) -> ComplexImage
{
  for (auto &v : a.data()) { v = std::conj(v); }
  return a;
}

auto magnitude(ComplexImage const &a) -> std::vector<Real>
{
  std::vector<Real> out(static_cast<std::size_t>(a.size()));
  for (Index i = 0; i < a.size(); i++) { out[i] = std::abs(a[i]); }
  return out;
}

auto rms(ComplexImage const &a) -> Real
{
  if (a.size() == 0) { return 0.0; }
  return std::sqrt(norm2(a) / static_cast<Real>(a.size()));
}

void require_finite(ComplexImage const &a, char const *what)
{
  if (!a.all_finite()) { throw NonFiniteError(std::string(what) + ": non-finite value"); }
}

} // namespace ensure
