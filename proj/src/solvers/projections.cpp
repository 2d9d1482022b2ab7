#include "ensure/solvers/projections.hpp"

#include "ensure/core/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace ensure {

auto to_string(WeightingMode m) -> std::string
{
  switch (m) {
  case WeightingMode::None: return "none";
  case WeightingMode::ClosedForm: return "closed-form";
  case WeightingMode::CgWeighted: return "cg-weighted";
  }
  return "?";
}

auto parse_weighting_mode(std::string const &s) -> WeightingMode
{
  if (s == "none")
    return WeightingMode::None;
  if (s == "closed-form")
    return WeightingMode::ClosedForm;
  if (s == "cg-weighted")
    return WeightingMode::CgWeighted;
  throw std::invalid_argument("unknown weighting mode '" + s + "' (expected none, closed-form or cg-weighted)");
}

auto recon_ls(MeasurementOperator const &op, KSpace const &y, SolverConfig const &cfg) -> CgResult
{
  auto normal = [&op](ComplexImage const &x) { return op.normal(x); };
  return cg_solve(normal, op.adjoint(y), cfg);
}

auto project_range(MeasurementOperator const &op, ComplexImage const &e, SolverConfig const &cfg) -> CgResult
{
  require_same_shape(op.shape(), e.shape(), "project_range");
  auto normal = [&op](ComplexImage const &x) { return op.normal(x); };
  return cg_solve(normal, op.normal(e), cfg);
}

auto weighted_project(MeasurementOperator const &op, WeightingSpec const &wspec, ComplexImage const &e,
                      SolverConfig const &cfg) -> CgResult
{
  return RangeProjector(op, wspec, cfg).apply(e);
}

auto apply_W(DensityMap const &density, ComplexImage const &img, bool inverse) -> ComplexImage
{
  require_same_shape(density.shape(), img.shape(), "apply_W");
  if (inverse && density.min() < kDensityFloor)
    throw std::invalid_argument("apply_W: inverse undefined for density below " + std::to_string(kDensityFloor));
  ComplexImage k = fft2c(img);
  for (Index i = 0; i < k.size(); ++i) {
    Real const s = std::sqrt(density[i]);
    k[i] *= inverse ? 1.0 / s : s;
  }
  return ifft2c(k);
}

auto apply_W(WeightingSpec const &wspec, MeasurementOperator const &op, ComplexImage const &img, bool inverse)
  -> ComplexImage
{
  if (!op.single_channel())
    throw std::invalid_argument("closed-form weighting is only defined for single-channel operators (got " +
                                std::to_string(op.n_channels()) + " coils); use cg-weighted");
  return apply_W(wspec.density, img, inverse);
}

auto q_bruteforce(DensityMap const &density) -> Eigen::MatrixXcd
{
  Shape const sh = density.shape();
  bool const lines = density.kind() == DensityKind::CartesianLines;
  Index const n = lines ? sh.cols : sh.size();
  if (n > 12)
    throw std::invalid_argument("q_bruteforce: " + std::to_string(n) +
                                " independent sampling locations exceeds the enumeration limit of 12");

  std::vector<Real> p(n);
  for (Index j = 0; j < n; ++j)
    p[j] = lines ? density(0, j) : density[j];

  // marginal inclusion probabilities conditioned on a non-empty mask
  std::vector<Real> q(n, 0.0);
  Real total = 0.0;
  for (std::uint64_t m = 1; m < (std::uint64_t{1} << n); ++m) {
    Real prob = 1.0;
    for (Index j = 0; j < n; ++j)
      prob *= (m >> j) & 1u ? p[j] : 1.0 - p[j];
    total += prob;
    for (Index j = 0; j < n; ++j)
      if ((m >> j) & 1u)
        q[j] += prob;
  }
  if (!(total > 0.0))
    throw std::invalid_argument("q_bruteforce: density never produces a non-empty mask");
  for (auto &v : q)
    v /= total;

  // Q = F^H diag(q) F, assembled column by column
  Index const N = sh.size();
  Eigen::MatrixXcd Q(N, N);
  for (Index c = 0; c < N; ++c) {
    ComplexImage e(sh);
    e[c] = 1.0;
    ComplexImage k = fft2c(e);
    for (Index i = 0; i < N; ++i)
      k[i] *= lines ? q[i % sh.cols] : q[i];
    ComplexImage col = ifft2c(k);
    for (Index i = 0; i < N; ++i)
      Q(i, c) = col[i];
  }
  return Q;
}

auto enumerate_masks(DensityMap const &density) -> std::vector<WeightedMask>
{
  Shape const sh = density.shape();
  bool const lines = density.kind() == DensityKind::CartesianLines;
  Index const n = lines ? sh.cols : sh.size();
  if (n > 12)
    throw std::invalid_argument("enumerate_masks: " + std::to_string(n) +
                                " independent sampling locations exceeds the enumeration limit of 12");
  std::vector<WeightedMask> out;
  Real total = 0.0;
  for (std::uint64_t m = 1; m < (std::uint64_t{1} << n); ++m) {
    std::vector<std::uint8_t> bits(sh.size());
    Real prob = 1.0;
    for (Index j = 0; j < n; ++j) {
      bool const on = (m >> j) & 1u;
      prob *= on ? (lines ? density(0, j) : density[j]) : 1.0 - (lines ? density(0, j) : density[j]);
    }
    for (Index i = 0; i < sh.size(); ++i)
      bits[i] = (m >> (lines ? i % sh.cols : i)) & 1u;
    total += prob;
    out.push_back({prob, SamplingMask(sh, std::move(bits))});
  }
  for (auto &w : out)
    w.probability /= total;
  return out;
}

RangeProjector::RangeProjector(MeasurementOperator op, WeightingSpec wspec, SolverConfig cfg)
  : op_(std::move(op)), wspec_(std::move(wspec)), cfg_(cfg)
{
  require_same_shape(op_.shape(), wspec_.density.shape(), "RangeProjector density");
  if (wspec_.mode == WeightingMode::ClosedForm && !op_.single_channel())
    throw std::invalid_argument("closed-form weighting is only defined for single-channel operators (got " +
                                std::to_string(op_.n_channels()) + " coils); use cg-weighted");
  auto const &d = wspec_.density.values();
  inv_sqrt_d_.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    inv_sqrt_d_[i] = 1.0 / std::sqrt(d[i]);
}

auto RangeProjector::normal_op() const -> NormalOp
{
  return [this](ComplexImage const &x) { return op_.normal(x); };
}

auto RangeProjector::rhs_map(ComplexImage const &e) const -> ComplexImage
{
  if (wspec_.mode == WeightingMode::CgWeighted)
    return op_.weighted_normal(e, inv_sqrt_d_);
  return op_.normal(e);
}

namespace {

auto closed_form(DensityMap const &density, SamplingMask const &mask, ComplexImage const &e) -> ComplexImage
{
  ComplexImage k = fft2c(e);
  for (Index i = 0; i < k.size(); ++i)
    k[i] *= mask[i] ? 1.0 / std::sqrt(density[i]) : 0.0;
  return ifft2c(k);
}

} // namespace

auto RangeProjector::apply(ComplexImage const &e) const -> CgResult
{
  require_same_shape(op_.shape(), e.shape(), "RangeProjector::apply");
  if (wspec_.mode == WeightingMode::ClosedForm)
    return {closed_form(wspec_.density, op_.mask(), e), {0, 0.0, true}};
  return cg_solve(normal_op(), rhs_map(e), cfg_);
}

auto RangeProjector::apply(ComplexImage const &e, CgTrace &trace) const -> ComplexImage
{
  require_same_shape(op_.shape(), e.shape(), "RangeProjector::apply");
  if (wspec_.mode == WeightingMode::ClosedForm) {
    trace = CgTrace{};
    return closed_form(wspec_.density, op_.mask(), e);
  }
  return cg_solve(normal_op(), rhs_map(e), cfg_, trace).x;
}

auto RangeProjector::backward(CgTrace const &trace, ComplexImage const &grad) const -> ComplexImage
{
  // closed form: W^-1 P is Fourier-diagonal and real, hence self-adjoint
  if (wspec_.mode == WeightingMode::ClosedForm)
    return closed_form(wspec_.density, op_.mask(), grad);
  // rhs_map is Hermitian
  return rhs_map(cg_backward(normal_op(), trace, grad));
}

auto RangeProjector::adjoint(ComplexImage const &v) const -> ComplexImage
{
  if (wspec_.mode == WeightingMode::ClosedForm)
    return closed_form(wspec_.density, op_.mask(), v);
  return rhs_map(cg_solve(normal_op(), v, cfg_).x);
}

auto RangeProjector::gram(ComplexImage const &v) const -> ComplexImage { return adjoint(apply(v).x); }

} // namespace ensure
