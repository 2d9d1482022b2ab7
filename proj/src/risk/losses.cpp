#include "ensure/risk/losses.hpp"

#include <json.hpp>

#include <numeric>
#include <stdexcept>

namespace ensure {

auto to_string(LossKind k) -> std::string
{
  switch (k) {
  case LossKind::Sup: return "sup";
  case LossKind::Kmse: return "kmse";
  case LossKind::Sure: return "sure";
  case LossKind::Gsure: return "gsure";
  case LossKind::Ssdu: return "ssdu";
  case LossKind::Ensure: return "ensure";
  }
  return "?";
}

auto parse_loss_kind(std::string const &s) -> LossKind
{
  for (auto k : {LossKind::Sup, LossKind::Kmse, LossKind::Sure, LossKind::Gsure, LossKind::Ssdu, LossKind::Ensure})
    if (to_string(k) == s)
      return k;
  throw std::invalid_argument("unknown loss '" + s + "' (expected sup, kmse, sure, gsure, ssdu or ensure)");
}

auto to_string(EnsureVariant v) -> std::string { return v == EnsureVariant::Plain ? "plain" : "projected"; }

auto parse_ensure_variant(std::string const &s) -> EnsureVariant
{
  if (s == "plain")
    return EnsureVariant::Plain;
  if (s == "projected")
    return EnsureVariant::Projected;
  throw std::invalid_argument("unknown ENSURE variant '" + s + "' (expected projected or plain)");
}

auto to_json(LossEstimate const &e) -> std::string
{
  nlohmann::json j;
  j["kind"] = to_string(e.kind);
  j["variant"] = to_string(e.variant);
  j["seed"] = e.seed;
  j["total"] = e.total;
  j["data_term"] = e.data_term;
  j["divergence_term"] = e.divergence_term;
  j["constant"] = e.constant;
  j["per_sample"] = e.per_sample;
  j["warnings"] = e.warnings;
  return j.dump();
}

namespace {

auto mean(std::vector<Real> const &v) -> Real
{
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / Real(v.size());
}

void finish(LossEstimate &e)
{
  if (e.per_sample_divergence.empty())
    e.per_sample_divergence.assign(e.per_sample_data.size(), 0.0);
  e.per_sample.resize(e.per_sample_data.size());
  for (std::size_t i = 0; i < e.per_sample.size(); ++i)
    e.per_sample[i] = e.per_sample_data[i] + e.per_sample_divergence[i];
  e.data_term = mean(e.per_sample_data);
  e.divergence_term = mean(e.per_sample_divergence);
  e.total = e.data_term + e.divergence_term + e.constant;
}

void require_batch(std::size_t a, std::size_t b, char const *what)
{
  if (a != b)
    throw std::invalid_argument(std::string(what) + ": batch lengths differ (" + std::to_string(a) + " vs " +
                                std::to_string(b) + ")");
  if (a == 0)
    throw std::invalid_argument(std::string(what) + ": empty batch");
}

} // namespace

auto sup_mse(std::span<ComplexImage const> preds, std::span<ComplexImage const> refs) -> LossEstimate
{
  require_batch(preds.size(), refs.size(), "sup_mse");
  LossEstimate e;
  e.kind = LossKind::Sup;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    require_same_shape(preds[i].shape(), refs[i].shape(), "sup_mse");
    e.per_sample_data.push_back(norm2(preds[i] - refs[i]));
  }
  finish(e);
  return e;
}

auto kmse_loss(std::span<MeasurementOperator const> ops, std::span<ComplexImage const> preds,
               std::span<KSpace const> ys) -> LossEstimate
{
  require_batch(ops.size(), preds.size(), "kmse_loss");
  require_batch(ops.size(), ys.size(), "kmse_loss");
  LossEstimate e;
  e.kind = LossKind::Kmse;
  for (std::size_t i = 0; i < ops.size(); ++i)
    e.per_sample_data.push_back(norm2(ops[i].apply(preds[i]) - ys[i]));
  finish(e);
  return e;
}

auto sure_denoise(ImageMap const &f, ComplexImage const &u, NoiseModel const &noise, DivergenceConfig const &div,
                  Rng &rng) -> LossEstimate
{
  if (noise.sigma < 0.0)
    throw std::invalid_argument("sure_denoise: sigma must be >= 0");
  LossEstimate e;
  e.kind = LossKind::Sure;
  e.seed = rng.seed();
  Real const tau2 = noise.component_variance();
  e.per_sample_data.push_back(norm2(f(u) - u));
  e.per_sample_divergence.push_back(tau2 > 0.0 ? 2.0 * tau2 * mc_divergence(f, u, div, rng) : 0.0);
  e.constant = -Real(2 * u.size()) * tau2;
  finish(e);
  return e;
}

auto ensure_loss(ReconMap const &f, std::span<Acquisition const> batch, WeightingSpec const &wspec,
                 NoiseModel const &noise, DivergenceConfig const &div, EnsureVariant variant, Rng &rng,
                 SolverConfig const &cfg) -> LossEstimate
{
  if (batch.empty())
    throw std::invalid_argument("ensure_loss: empty batch");
  if (noise.sigma < 0.0)
    throw std::invalid_argument("ensure_loss: sigma must be >= 0");
  validate(div);
  LossEstimate e;
  e.kind = LossKind::Ensure;
  e.variant = variant;
  std::uint64_t const base = rng.next_u64();
  e.seed = base;
  Real const sigma2 = noise.sigma * noise.sigma;

  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto const &[op, y] = batch[i];
    ComplexImage const u = op.adjoint(y);
    ComplexImage const rho_hat = f(u, op);
    auto ls = recon_ls(op, y, cfg);
    if (!ls.report.converged)
      e.warnings.push_back("sample " + std::to_string(i) + ": least-squares CG stopped at relative residual " +
                           std::to_string(ls.report.relative_residual));
    RangeProjector proj(op, wspec, cfg);
    auto z = proj.apply(rho_hat - ls.x);
    if (!z.report.converged)
      e.warnings.push_back("sample " + std::to_string(i) + ": projection CG stopped at relative residual " +
                           std::to_string(z.report.relative_residual));
    e.per_sample_data.push_back(norm2(z.x));

    Real d = 0.0;
    if (sigma2 > 0.0) {
      Rng prng(base, i);
      ImageMap fi = [&](ComplexImage const &v) { return f(v, op); };
      if (variant == EnsureVariant::Plain) {
        d = mc_divergence(fi, u, div, prng);
      } else {
        ImageMap gram = [&](ComplexImage const &b) { return proj.gram(b); };
        d = mc_divergence(fi, gram, u, div, prng);
      }
    }
    e.per_sample_divergence.push_back(sigma2 * d);
  }
  finish(e);
  return e;
}

auto gsure_loss(ReconMap const &f, std::span<Acquisition const> batch, DensityMap const &density,
                NoiseModel const &noise, DivergenceConfig const &div, Rng &rng, SolverConfig const &cfg)
  -> LossEstimate
{
  for (auto const &a : batch)
    if (!(a.op.mask() == batch.front().op.mask()))
      throw std::invalid_argument("gsure_loss: every sample must share one sampling mask");
  auto e = ensure_loss(f, batch, WeightingSpec{density, WeightingMode::None}, noise, div, EnsureVariant::Projected,
                       rng, cfg);
  e.kind = LossKind::Gsure;
  return e;
}

} // namespace ensure
