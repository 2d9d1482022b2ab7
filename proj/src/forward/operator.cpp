#include "ensure/forward/operator.hpp"

#include "ensure/core/fft.hpp"

namespace ensure {

namespace {

void require_same_layout(KSpace const &a, KSpace const &b, char const *what)
{
  if (a.n_channels() != b.n_channels()) { throw ShapeError(std::string(what) + ": channel count mismatch"); }
  for (Index j = 0; j < a.n_channels(); j++) { require_same_shape(a.channels[j].shape(), b.channels[j].shape(), what); }
}

} // namespace

auto operator-(KSpace a, KSpace const &b) -> KSpace
{
  require_same_layout(a, b, "KSpace operator-");
  for (Index j = 0; j < a.n_channels(); j++) { a.channels[j] -= b.channels[j]; }
  return a;
}

auto operator+(KSpace a, KSpace const &b) -> KSpace
{
  require_same_layout(a, b, "KSpace operator+");
  for (Index j = 0; j < a.n_channels(); j++) { a.channels[j] += b.channels[j]; }
  return a;
}

auto inner(KSpace const &a, KSpace const &b) -> Cx
{
  require_same_layout(a, b, "KSpace inner");
  Cx acc{0.0, 0.0};
  for (Index j = 0; j < a.n_channels(); j++) { acc += inner(a.channels[j], b.channels[j]); }
  return acc;
}

auto norm2(KSpace const &a) -> Real
{
  Real acc = 0.0;
  for (auto const &c : a.channels) { acc += norm2(c); }
  return acc;
}

MeasurementOperator::MeasurementOperator(SamplingMask mask, std::optional<CoilMaps> coils, Real sigma, Index id)
  : mask_{std::move(mask)}
  , coils_{std::move(coils)}
  , sigma_{sigma}
  , id_{id}
{
  if (sigma_ < 0.0) { throw std::invalid_argument("MeasurementOperator: sigma must be >= 0"); }
  if (coils_) {
    if (coils_->n_coils() < 1) { throw std::invalid_argument("MeasurementOperator: empty coil set"); }
    for (auto const &c : coils_->maps) { require_same_shape(c.shape(), mask_.shape(), "MeasurementOperator coils"); }
  }
}

auto MeasurementOperator::with_mask(SamplingMask mask) const -> MeasurementOperator
{
  require_same_shape(mask.shape(), mask_.shape(), "with_mask");
  return MeasurementOperator(std::move(mask), coils_, sigma_, id_);
}

auto MeasurementOperator::apply(ComplexImage const &img) const -> KSpace
{
  require_same_shape(img.shape(), shape(), "apply_forward");
  auto const &m = mask_.bits();
  KSpace y;
  y.channels.reserve(static_cast<std::size_t>(n_channels()));
  for (Index j = 0; j < n_channels(); j++) {
    auto k = coils_ ? fft2c(hadamard(img, coils_->maps[j])) : fft2c(img);
    for (Index i = 0; i < k.size(); i++) {
      if (!m[i]) { k[i] = Cx{0.0, 0.0}; }
    }
    y.channels.push_back(std::move(k));
  }
  return y;
}

auto MeasurementOperator::adjoint(KSpace const &y) const -> ComplexImage
{
  if (y.n_channels() != n_channels()) { throw ShapeError("apply_adjoint: channel count mismatch"); }
  auto const &m = mask_.bits();
  ComplexImage out(shape());
  for (Index j = 0; j < n_channels(); j++) {
    require_same_shape(y.channels[j].shape(), shape(), "apply_adjoint");
    ComplexImage k = y.channels[j];
    for (Index i = 0; i < k.size(); i++) {
      if (!m[i]) { k[i] = Cx{0.0, 0.0}; }
    }
    auto img = ifft2c(k);
    if (coils_) {
      auto const &c = coils_->maps[j];
      for (Index i = 0; i < img.size(); i++) { out[i] += std::conj(c[i]) * img[i]; }
    } else {
      out += img;
    }
  }
  return out;
}

auto MeasurementOperator::normal(ComplexImage const &x) const -> ComplexImage
{
  return adjoint(apply(x));
}

auto MeasurementOperator::weight(KSpace y, std::vector<Real> const &w) const -> KSpace
{
  if (static_cast<Index>(w.size()) != shape().size()) { throw ShapeError("weight: weight length does not match k-space"); }
  auto const &m = mask_.bits();
  for (auto &ch : y.channels) {
    for (Index i = 0; i < ch.size(); i++) { ch[i] *= m[i] ? w[i] : 0.0; }
  }
  return y;
}

auto MeasurementOperator::weighted_normal(ComplexImage const &x, std::vector<Real> const &w) const -> ComplexImage
{
  return adjoint(weight(apply(x), w));
}

auto MeasurementOperator::contract() const -> LinearOperatorContract
{
  Shape const s = shape();
  Index const n = s.size();
  Index const nc = n_channels();
  return LinearOperatorContract{
    .domain_size = n,
    .range_size = n * nc,
    .apply =
      [this, s, n](CxVector const &x) {
        auto const y = apply(ComplexImage(s, x));
        CxVector out;
        out.reserve(static_cast<std::size_t>(n * n_channels()));
        for (auto const &ch : y.channels) { out.insert(out.end(), ch.data().begin(), ch.data().end()); }
        return out;
      },
    .adjoint =
      [this, s, n, nc](CxVector const &yv) {
        KSpace y;
        for (Index j = 0; j < nc; j++) {
          y.channels.emplace_back(s, CxVector(yv.begin() + j * n, yv.begin() + (j + 1) * n));
        }
        auto const x = adjoint(y);
        return x.values();
      },
  };
}

auto add_noise(KSpace y, SamplingMask const &mask, Real sigma, Rng &rng) -> KSpace
{
  if (sigma < 0.0) { throw std::invalid_argument("add_noise: sigma must be >= 0"); }
  if (sigma == 0.0) { return y; }
  auto const &m = mask.bits();
  for (auto &ch : y.channels) {
    require_same_shape(ch.shape(), mask.shape(), "add_noise");
    auto const n = randn_complex(ch.shape(), sigma, rng);
    for (Index i = 0; i < ch.size(); i++) {
      if (m[i]) { ch[i] += n[i]; }
    }
  }
  return y;
}

} // namespace ensure
