#pragma once

#include "ensure/net/network.hpp"
#include "ensure/risk/losses.hpp"
#include "ensure/risk/ssdu.hpp"

#include <optional>

namespace ensure {

// Everything a training loss may look at for one image. ground_truth is
// filled only for the supervised loss.
struct TrainingSample
{
  Index index = 0;
  MeasurementOperator op;
  KSpace y;
  ComplexImage u;                          // A^H y
  std::optional<ComplexImage> ground_truth;
  std::optional<ComplexImage> rho_ls;      // ensure / gsure
  std::optional<SsduSplit> ssdu;           // ssdu
};

struct ObjectiveConfig
{
  LossKind kind = LossKind::Ensure;
  EnsureVariant variant = EnsureVariant::Projected;
  WeightingMode weighting = WeightingMode::CgWeighted;
  std::optional<DensityMap> density; // ensure / gsure
  NoiseModel noise;
  DivergenceConfig div;
  // R_s inside the differentiated data term
  SolverConfig projection{1e-6, 30, 1e-12, true};
  // rho_LS and R^H R probes (not differentiated)
  SolverConfig solve{1e-6, 100, 1e-10, false};
  Real ssdu_ratio = 0.8;
};

// Builds the loss-specific fields of a sample (rho_LS, SSDU split).
void prepare_sample(TrainingSample &s, ObjectiveConfig const &cfg, Rng &rng);

struct SampleResult
{
  Real data = 0.0;
  Real divergence = 0.0;
  std::vector<Real> grad; // empty unless requested
};

// Per-image loss and its gradient with respect to the network parameters.
// probes feeds the divergence estimate; reseeding it reproduces the value
// exactly.
auto evaluate_sample(ReconNetwork const &net, TrainingSample const &s, ObjectiveConfig const &cfg, Rng &probes,
                     bool with_grad) -> SampleResult;

// Reconstruction at test time.
auto reconstruct(ReconNetwork const &net, MeasurementOperator const &op, KSpace const &y) -> ComplexImage;

} // namespace ensure
