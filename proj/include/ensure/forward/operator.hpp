#pragma once

#include "ensure/core/linear_operator.hpp"
#include "ensure/forward/coils.hpp"
#include "ensure/forward/density.hpp"
#include "ensure/forward/mask.hpp"

#include <optional>
#include <vector>

namespace ensure {

// Measurement vector: one full k-space grid per channel, zero wherever the
// mask is zero.
struct KSpace
{
  std::vector<ComplexImage> channels;

  [[nodiscard]] auto n_channels() const -> Index { return static_cast<Index>(channels.size()); }
  [[nodiscard]] auto shape() const -> Shape { return channels.empty() ? Shape{} : channels.front().shape(); }
  auto operator==(KSpace const &) const -> bool = default;
};

auto operator-(KSpace a, KSpace const &b) -> KSpace;
auto operator+(KSpace a, KSpace const &b) -> KSpace;
auto inner(KSpace const &a, KSpace const &b) -> Cx;
auto norm2(KSpace const &a) -> Real;

// A_s of the measurement model: mask, optional coil sensitivities and the
// centered unitary Fourier transform.
class MeasurementOperator
{
public:
  MeasurementOperator(SamplingMask mask, std::optional<CoilMaps> coils = std::nullopt, Real sigma = 0.0, Index id = 0);

  [[nodiscard]] auto mask() const -> SamplingMask const & { return mask_; }
  [[nodiscard]] auto coils() const -> std::optional<CoilMaps> const & { return coils_; }
  [[nodiscard]] auto sigma() const -> Real { return sigma_; }
  [[nodiscard]] auto id() const -> Index { return id_; }
  [[nodiscard]] auto shape() const -> Shape { return mask_.shape(); }
  [[nodiscard]] auto n_channels() const -> Index { return coils_ ? coils_->n_coils() : 1; }
  [[nodiscard]] auto single_channel() const -> bool { return !coils_; }

  // Same coils and noise level, different sampling pattern.
  [[nodiscard]] auto with_mask(SamplingMask mask) const -> MeasurementOperator;

  [[nodiscard]] auto apply(ComplexImage const &img) const -> KSpace;
  [[nodiscard]] auto adjoint(KSpace const &y) const -> ComplexImage;
  // A^H A x
  [[nodiscard]] auto normal(ComplexImage const &x) const -> ComplexImage;
  // A^H diag(w) A x, with w a per-location k-space weight shared by all
  // channels.
  [[nodiscard]] auto weighted_normal(ComplexImage const &x, std::vector<Real> const &w) const -> ComplexImage;
  // Multiplies every channel by w (also zeroes unsampled locations).
  [[nodiscard]] auto weight(KSpace y, std::vector<Real> const &w) const -> KSpace;

  [[nodiscard]] auto contract() const -> LinearOperatorContract;

private:
  SamplingMask mask_;
  std::optional<CoilMaps> coils_;
  Real sigma_;
  Index id_;
};

inline auto apply_forward(MeasurementOperator const &op, ComplexImage const &img) -> KSpace { return op.apply(img); }
inline auto apply_adjoint(MeasurementOperator const &op, KSpace const &y) -> ComplexImage { return op.adjoint(y); }

// y + n with n drawn only at sampled locations; unsampled entries of the
// result are exactly zero.
auto add_noise(KSpace y, SamplingMask const &mask, Real sigma, Rng &rng) -> KSpace;

} // namespace ensure
