#pragma once

#include "ensure/cli/config.hpp"
#include "ensure/metrics/report.hpp"

#include <functional>

namespace ensure {

// Training split as loss inputs. Ground truth is requested from the handle
// only when the objective is supervised, so an unsupervised handle
// stays unread.
auto training_samples(Dataset const &ds, ObjectiveConfig const &obj, std::uint64_t seed)
  -> std::vector<TrainingSample>;

using Reconstructor = std::function<ComplexImage(MeasurementOperator const &, KSpace const &)>;

struct EvalResult
{
  std::vector<Real> psnr; // per image of the split
  std::vector<Real> ssim;
  std::vector<MetricRow> rows; // one per image, then the aggregate row
  MetricRow summary;
};

auto evaluate(Reconstructor const &recon, Dataset const &ds, Split split, std::string const &method) -> EvalResult;

// Zero-filled passthrough, u = A^H y.
auto zero_filled() -> Reconstructor;
auto network_reconstructor(ReconNetwork const &net) -> Reconstructor;

// Mean PSNR/SSIM over the validation split of a supervised handle.
auto make_validator(Dataset const &reference) -> Validator;

struct RunResult
{
  TrainResult trained;
  EvalResult test;
};

// Train on `train_handle` (blinded unless the loss is supervised), then
// score the test split of `reference`.
auto run_experiment(ExperimentConfig const &cfg, Dataset const &train_handle, Dataset const &reference,
                    std::function<void(EpochLog const &)> const &on_epoch = {}) -> RunResult;

} // namespace ensure
