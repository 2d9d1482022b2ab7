#include "dense.hpp"

#include "ensure/core/fft.hpp"
#include "ensure/core/linear_operator.hpp"
#include "ensure/core/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace ensure;

namespace {

auto random_image(Shape sh, std::uint64_t seed) -> ComplexImage
{
  Rng rng(seed);
  return randn_complex(sh, 1.0, rng);
}

} // namespace

TEST_CASE("fft2c of a constant image is a centred spike")
{
  ComplexImage x(Shape{4, 4}, Cx{1.0, 0.0});
  auto k = fft2c(x);
  for (Index r = 0; r < 4; ++r)
    for (Index c = 0; c < 4; ++c) {
      if (r == 2 && c == 2)
        CHECK(std::abs(k(r, c) - Cx{4.0, 0.0}) < 1e-12);
      else
        CHECK(std::abs(k(r, c)) < 1e-12);
    }
}

TEST_CASE("ifft2c of a centred impulse is flat with magnitude 1/sqrt(HW)")
{
  ComplexImage k(Shape{4, 4});
  k(2, 2) = 1.0;
  auto x = ifft2c(k);
  for (Index i = 0; i < x.size(); ++i)
    CHECK(std::abs(x[i] - Cx{0.25, 0.0}) < 1e-12);
  CHECK(norm(ifft2c(ComplexImage(Shape{4, 4}))) == 0.0);
}

TEST_CASE("fft2c matches the dense centred DFT for even and odd sizes")
{
  for (Shape sh : {Shape{4, 4}, Shape{5, 3}, Shape{6, 7}, Shape{1, 8}}) {
    auto x = random_image(sh, 11);
    Eigen::MatrixXcd F = dense::dft2(sh);
    CHECK(dense::rel_diff(dense::vec(fft2c(x)), F * dense::vec(x)) < 1e-12);
    CHECK(dense::rel_diff(dense::vec(ifft2c(x)), F.adjoint() * dense::vec(x)) < 1e-12);
  }
}

TEST_CASE("fft2c is a unitary round trip")
{
  auto x = random_image({8, 8}, 1);
  CHECK(norm(ifft2c(fft2c(x)) - x) / norm(x) < 1e-12);
  CHECK(norm(fft2c(ifft2c(x)) - x) / norm(x) < 1e-12);
  auto y = random_image({16, 16}, 2);
  CHECK(std::abs(norm(fft2c(y)) - norm(y)) / norm(y) < 1e-12);
}

TEST_CASE("shifts are mutual inverses")
{
  for (Shape sh : {Shape{4, 6}, Shape{5, 7}}) {
    auto x = random_image(sh, 3);
    auto y = x;
    fftshift(y);
    ifftshift(y);
    CHECK(y == x);
  }
}

TEST_CASE("randn_complex")
{
  SUBCASE("sigma 0 gives zeros")
  {
    Rng rng(1);
    CHECK(norm(randn_complex({8, 8}, 0.0, rng)) == 0.0);
  }
  SUBCASE("E|n|^2 = sigma^2, split evenly between Re and Im")
  {
    Rng rng(5);
    auto n = randn_complex({1000, 1000}, 1.0, rng);
    Real m2 = 0.0, re2 = 0.0;
    for (Index i = 0; i < n.size(); ++i) {
      m2 += std::norm(n[i]);
      re2 += n[i].real() * n[i].real();
    }
    m2 /= Real(n.size());
    re2 /= Real(n.size());
    CHECK(m2 >= 0.997);
    CHECK(m2 <= 1.003);
    CHECK(std::abs(re2 - 0.5) < 0.003);
  }
  SUBCASE("bit-identical for a fixed seed and stream")
  {
    Rng a(7, 0), b(7, 0);
    CHECK(randn_complex({8, 8}, 1.0, a) == randn_complex({8, 8}, 1.0, b));
  }
}

TEST_CASE("distinct rng streams are uncorrelated")
{
  Rng a(1, 0), b(1, 1), c(2, 0);
  int const n = 100000;
  std::vector<Real> xa(n), xb(n), xc(n);
  for (int i = 0; i < n; ++i) {
    xa[i] = a.normal();
    xb[i] = b.normal();
    xc[i] = c.normal();
  }
  auto corr = [&](std::vector<Real> const &u, std::vector<Real> const &v) {
    Real su = 0, sv = 0, suu = 0, svv = 0, suv = 0;
    for (int i = 0; i < n; ++i) {
      su += u[i];
      sv += v[i];
      suu += u[i] * u[i];
      svv += v[i] * v[i];
      suv += u[i] * v[i];
    }
    Real const cov = suv / n - su / n * sv / n;
    return cov / std::sqrt((suu / n - su / n * su / n) * (svv / n - sv / n * sv / n));
  };
  CHECK(std::abs(corr(xa, xb)) < 0.01);
  CHECK(std::abs(corr(xa, xc)) < 0.01);
  CHECK(std::abs(corr(xb, xc)) < 0.01);
}

TEST_CASE("uniform_index stays in range and hits every value")
{
  Rng rng(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    auto v = rng.uniform_index(7);
    REQUIRE(v < 7);
    hits[v]++;
  }
  for (int h : hits)
    CHECK(h > 800);
}

TEST_CASE("adjoint_check")
{
  Rng rng(9);
  CHECK(adjoint_check(identity_contract(16), 5, rng) == 0.0);
  CHECK_THROWS_AS(adjoint_check(identity_contract(4), 0, rng), std::invalid_argument);

  // adjoint off by a factor 2 on the identity: the gap is |<x,y>| / (|x||y|)
  auto wrong = identity_contract(6);
  wrong.adjoint = [](CxVector const &y) {
    CxVector out = y;
    for (auto &v : out)
      v *= 2.0;
    return out;
  };
  Rng r1(21), r2(21);
  Real const got = adjoint_check(wrong, 10, r1);
  Real expect = 0.0;
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXcd x(6), y(6);
    for (int i = 0; i < 6; ++i) {
      Real const re = r2.normal();
      x(i) = Cx{re, r2.normal()};
    }
    for (int i = 0; i < 6; ++i) {
      Real const re = r2.normal();
      y(i) = Cx{re, r2.normal()};
    }
    expect = std::max(expect, std::abs(x.dot(y)) / (x.norm() * y.norm()));
  }
  CHECK(got == doctest::Approx(expect).epsilon(1e-12));
  CHECK(got > 0.05);
}

TEST_CASE("image arithmetic")
{
  auto a = random_image({3, 5}, 1), b = random_image({3, 5}, 2);
  CHECK(std::abs(inner(a, b) - std::conj(inner(b, a))) < 1e-12);
  CHECK(real_inner(a, a) == doctest::Approx(norm2(a)));
  CHECK_THROWS_AS(a += ComplexImage(Shape{5, 3}), ShapeError);
  ComplexImage bad(Shape{2, 2});
  bad[1] = Cx{std::nan(""), 0.0};
  CHECK_FALSE(bad.all_finite());
  CHECK_THROWS_AS(require_finite(bad, "x"), NonFiniteError);
}
