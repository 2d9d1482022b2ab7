#include "ensure/net/train.hpp"

#include "ensure/core/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace ensure {

namespace {

auto finite(std::vector<Real> const &v) -> bool
{
  return std::all_of(v.begin(), v.end(), [](Real x) { return std::isfinite(x); });
}

} // namespace

auto train(ReconNetwork net, std::vector<TrainingSample> const &samples, ObjectiveConfig const &obj,
           TrainConfig const &cfg, Validator const &validate, std::function<void(EpochLog const &)> const &on_epoch)
  -> TrainResult
{
  if (samples.empty())
    throw std::invalid_argument("train: no training samples");
  if (cfg.epochs < 0 || cfg.batch < 1)
    throw std::invalid_argument("train: epochs must be >= 0 and batch >= 1");
  if (!(cfg.lr >= 0.0))
    throw std::invalid_argument("train: learning rate must be >= 0");

  auto const n = samples.size();
  auto const P = std::size_t(net.size());
  std::vector<Real> m(P, 0.0), v(P, 0.0);
  std::vector<Real> sample_data(n), sample_div(n);
  std::vector<SampleResult> results;
  long step = 0;
  Rng shuffle_rng(cfg.seed, 0x73687566);

  TrainResult out{net, {}};
  auto &theta = out.net.params();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    auto const t0 = std::chrono::steady_clock::now();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i)
      std::swap(order[i], order[shuffle_rng.uniform_index(i + 1)]);

    for (std::size_t start = 0; start < n; start += std::size_t(cfg.batch)) {
      std::size_t const end = std::min(n, start + std::size_t(cfg.batch));
      results.assign(end - start, {});
      parallel_for(end - start, [&](std::size_t j) {
        std::size_t const idx = order[start + j];
        // probe stream keyed by (epoch, sample), independent of scheduling
        Rng probes(cfg.seed ^ 0x70726f6265ULL, std::uint64_t(epoch) * n + idx);
        results[j] = evaluate_sample(out.net, samples[idx], obj, probes, true);
      });
      std::vector<Real> grad(P, 0.0);
      for (std::size_t j = 0; j < results.size(); ++j) {
        auto const &r = results[j];
        std::size_t const idx = order[start + j];
        if (!std::isfinite(r.data) || !std::isfinite(r.divergence) || !finite(r.grad))
          throw TrainingDiverged("training diverged: non-finite " + to_string(obj.kind) + " loss at epoch " +
                                 std::to_string(epoch) + ", sample " + std::to_string(samples[idx].index) +
                                 " (data " + std::to_string(r.data) + ", divergence " +
                                 std::to_string(r.divergence) + ")");
        sample_data[idx] = r.data;
        sample_div[idx] = r.divergence;
        for (std::size_t k = 0; k < P; ++k)
          grad[k] += r.grad[k];
      }
      Real const inv = 1.0 / Real(results.size());
      ++step;
      Real const bc1 = 1.0 - std::pow(cfg.beta1, Real(step));
      Real const bc2 = 1.0 - std::pow(cfg.beta2, Real(step));
      for (std::size_t k = 0; k < P; ++k) {
        Real const g = grad[k] * inv;
        m[k] = cfg.beta1 * m[k] + (1 - cfg.beta1) * g;
        v[k] = cfg.beta2 * v[k] + (1 - cfg.beta2) * g * g;
        theta[k] -= cfg.lr * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + cfg.adam_eps);
      }
    }

    EpochLog log;
    log.epoch = epoch;
    // fixed index order, so the value does not depend on the shuffle
    for (std::size_t i = 0; i < n; ++i) {
      log.data += sample_data[i];
      log.divergence += sample_div[i];
    }
    log.data /= Real(n);
    log.divergence /= Real(n);
    log.loss = log.data + log.divergence;
    log.val_psnr = log.val_ssim = std::nan("");
    if (validate) {
      auto s = validate(out.net);
      log.val_psnr = s.psnr;
      log.val_ssim = s.ssim;
    }
    log.seconds = std::chrono::duration<Real>(std::chrono::steady_clock::now() - t0).count();
    out.log.push_back(log);
    if (on_epoch)
      on_epoch(log);
  }
  return out;
}

} // namespace ensure
