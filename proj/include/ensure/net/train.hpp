#pragma once

#include "ensure/net/objectives.hpp"

#include <functional>
#include <stdexcept>

namespace ensure {

struct TrainConfig
{
  int epochs = 50;
  Real lr = 1e-3;
  int batch = 1;
  std::uint64_t seed = 0;
  Real beta1 = 0.9;
  Real beta2 = 0.999;
  Real adam_eps = 1e-8;
};

struct EpochLog
{
  int epoch = 0;
  Real loss = 0.0; // mean over the epoch's samples, at pre-update parameters
  Real data = 0.0;
  Real divergence = 0.0;
  Real val_psnr = 0.0; // NaN without a validation set
  Real val_ssim = 0.0;
  Real seconds = 0.0;
};

struct ValidationScore
{
  Real psnr;
  Real ssim;
};

using Validator = std::function<ValidationScore(ReconNetwork const &)>;

struct TrainResult
{
  ReconNetwork net;
  std::vector<EpochLog> log;
};

class TrainingDiverged : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Adam over shuffled mini-batches; per-sample work may run in parallel but
// is reduced in a fixed order, so results are identical for any thread
// count.
auto train(ReconNetwork net, std::vector<TrainingSample> const &samples, ObjectiveConfig const &obj,
           TrainConfig const &cfg, Validator const &validate = {}, std::function<void(EpochLog const &)> const &on_epoch = {})
  -> TrainResult;

} // namespace ensure
