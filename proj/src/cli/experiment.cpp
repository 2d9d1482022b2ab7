#include "ensure/cli/experiment.hpp"

#include "ensure/metrics/metrics.hpp"

namespace ensure {

auto training_samples(Dataset const &ds, ObjectiveConfig const &obj, std::uint64_t seed)
  -> std::vector<TrainingSample>
{
  auto const r = ds.range(Split::Train);
  if (r.size() == 0)
    throw std::invalid_argument("dataset has no training images");
  bool const supervised = obj.kind == LossKind::Sup;
  if (supervised && (ds.access() != Access::Supervised || !ds.stores_ground_truth()))
    throw BlindedAccess("the supervised loss needs ground truth (gt.bin), which this dataset handle does not provide");
  std::vector<TrainingSample> out;
  Rng const split_rng(seed, 0x73736475);
  for (Index i = r.begin; i < r.end; ++i) {
    TrainingSample s{i, ds.op(i), ds.y(i), {}, {}, {}, {}};
    if (supervised)
      s.ground_truth = ds.ground_truth(i);
    Rng rng = split_rng.substream(std::uint64_t(i));
    prepare_sample(s, obj, rng);
    out.push_back(std::move(s));
  }
  return out;
}

auto evaluate(Reconstructor const &recon, Dataset const &ds, Split split, std::string const &method) -> EvalResult
{
  auto const r = ds.range(split);
  if (r.size() == 0)
    throw std::invalid_argument("dataset has no " + to_string(split) + " images to evaluate");
  EvalResult e;
  Real const accel = ds.config().accel, sigma = ds.config().sigma;
  for (Index i = r.begin; i < r.end; ++i) {
    auto const &ref = ds.ground_truth(i);
    auto const img = recon(ds.op(i), ds.y(i));
    e.psnr.push_back(psnr(ref, img));
    e.ssim.push_back(ssim(ref, img));
    e.rows.push_back({method + "/" + to_string(split) + "_" + std::to_string(i - r.begin), accel, sigma,
                      e.psnr.back(), 0.0, e.ssim.back(), 0.0});
  }
  auto const p = mean_std(e.psnr), s = mean_std(e.ssim);
  e.summary = {method, accel, sigma, p.mean, p.std, s.mean, s.std};
  e.rows.push_back(e.summary);
  return e;
}

auto zero_filled() -> Reconstructor
{
  return [](MeasurementOperator const &op, KSpace const &y) { return op.adjoint(y); };
}

auto network_reconstructor(ReconNetwork const &net) -> Reconstructor
{
  return [&net](MeasurementOperator const &op, KSpace const &y) { return reconstruct(net, op, y); };
}

auto make_validator(Dataset const &reference) -> Validator
{
  if (reference.range(Split::Val).size() == 0)
    return {};
  return [&reference](ReconNetwork const &net) {
    auto e = evaluate(network_reconstructor(net), reference, Split::Val, "val");
    return ValidationScore{e.summary.psnr_mean, e.summary.ssim_mean};
  };
}

auto run_experiment(ExperimentConfig const &cfg, Dataset const &train_handle, Dataset const &reference,
                    std::function<void(EpochLog const &)> const &on_epoch) -> RunResult
{
  auto const obj = objective_for(cfg.loss, train_handle.density(), train_handle.config().sigma);
  auto samples = training_samples(train_handle, obj, cfg.train.seed);
  auto net = init_network(cfg.net, std::uint64_t(cfg.net_seed));
  auto trained = train(std::move(net), samples, obj, cfg.train, make_validator(reference), on_epoch);
  auto test = evaluate(network_reconstructor(trained.net), reference, Split::Test, to_string(cfg.loss.kind));
  return {std::move(trained), std::move(test)};
}

} // namespace ensure
