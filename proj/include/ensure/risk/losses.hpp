#pragma once

#include "ensure/risk/divergence.hpp"
#include "ensure/solvers/projections.hpp"

#include <span>
#include <string>
#include <vector>

namespace ensure {

enum class LossKind
{
  Sup,
  Kmse,
  Sure,
  Gsure,
  Ssdu,
  Ensure,
};

enum class EnsureVariant
{
  Plain,     // sigma^2 div f, unweighted divergence
  Projected, // sigma^2 div (R^H R f)
};

auto to_string(LossKind k) -> std::string;
auto parse_loss_kind(std::string const &s) -> LossKind;
auto to_string(EnsureVariant v) -> std::string;
auto parse_ensure_variant(std::string const &s) -> EnsureVariant;

// C = sigma^2 I with Re, Im ~ N(0, sigma^2 / 2).
struct NoiseModel
{
  Real sigma = 0.0;
  [[nodiscard]] auto component_variance() const -> Real { return 0.5 * sigma * sigma; }
};

struct LossEstimate
{
  LossKind kind = LossKind::Sup;
  EnsureVariant variant = EnsureVariant::Projected;
  std::uint64_t seed = 0;
  Real total = 0.0;
  Real data_term = 0.0;       // mean over samples
  Real divergence_term = 0.0; // mean over samples
  Real constant = 0.0;        // parameter-independent offset (SURE's -N tau^2)
  std::vector<Real> per_sample; // data + divergence per sample
  std::vector<Real> per_sample_data;
  std::vector<Real> per_sample_divergence;
  std::vector<std::string> warnings;
};

auto to_json(LossEstimate const &e) -> std::string;

// One acquired sample: operator and its (noisy) measurements.
struct Acquisition
{
  MeasurementOperator op;
  KSpace y;
};

// Reconstruction network seen by the losses: input image u and the operator
// it was formed with (for data consistency).
using ReconMap = std::function<ComplexImage(ComplexImage const &u, MeasurementOperator const &op)>;

auto sup_mse(std::span<ComplexImage const> preds, std::span<ComplexImage const> refs) -> LossEstimate;

auto kmse_loss(std::span<MeasurementOperator const> ops, std::span<ComplexImage const> preds,
               std::span<KSpace const> ys) -> LossEstimate;

// Denoising SURE: ||f(u) - u||^2 + 2 tau^2 div f - N tau^2, N = 2HW,
// tau^2 = sigma^2 / 2.
auto sure_denoise(ImageMap const &f, ComplexImage const &u, NoiseModel const &noise, DivergenceConfig const &div,
                  Rng &rng) -> LossEstimate;

// Data term ||R_s (f(u) - rho_LS)||^2 with u = A^H y, plus the divergence
// of the selected variant. Per-sample probe streams derive from one draw of
// rng, so results do not depend on evaluation order.
auto ensure_loss(ReconMap const &f, std::span<Acquisition const> batch, WeightingSpec const &wspec,
                 NoiseModel const &noise, DivergenceConfig const &div, EnsureVariant variant, Rng &rng,
                 SolverConfig const &cfg = {}) -> LossEstimate;

// ENSURE without weighting on a shared mask.
auto gsure_loss(ReconMap const &f, std::span<Acquisition const> batch, DensityMap const &density,
                NoiseModel const &noise, DivergenceConfig const &div, Rng &rng, SolverConfig const &cfg = {})
  -> LossEstimate;

} // namespace ensure
