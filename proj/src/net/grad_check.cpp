#include "ensure/net/grad_check.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace ensure {

auto grad_check(ReconNetwork const &net, TrainingSample const &sample, ObjectiveConfig const &obj, Real tol,
                int n_params, std::uint64_t seed, Real step) -> GradCheckReport
{
  std::uint64_t const probe_seed = seed ^ 0x67726164ULL;
  auto eval = [&](ReconNetwork const &n, bool with_grad) {
    Rng probes(probe_seed);
    return evaluate_sample(n, sample, obj, probes, with_grad);
  };
  auto const base = eval(net, true);

  std::vector<Index> idx(std::size_t(net.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  if (n_params > 0 && n_params < net.size()) {
    Rng rng(seed, 0x6763);
    for (std::size_t i = idx.size() - 1; i > 0; --i)
      std::swap(idx[i], idx[rng.uniform_index(i + 1)]);
    idx.resize(std::size_t(n_params));
  }

  Real gscale = 0.0;
  for (Real g : base.grad)
    gscale = std::max(gscale, std::abs(g));

  GradCheckReport rep;
  rep.loss = to_string(obj.kind);
  rep.tol = tol;
  ReconNetwork probe = net;
  for (Index k : idx) {
    Real const theta = net.params()[k];
    Real const scale = step * std::max(1.0, std::abs(theta));
    auto at = [&](Real t) {
      probe.params()[k] = theta + t;
      auto const r = eval(probe, false);
      return r.data + r.divergence;
    };
    // Central differences over a ladder of steps; the estimate comes from
    // where neighbouring steps agree best. Large steps can straddle a ReLU
    // kink, small ones drown in rounding (the divergence term is itself a
    // difference quotient in u).
    std::array<Real, 4> fd{};
    for (std::size_t j = 0; j < fd.size(); ++j) {
      Real const h = scale * std::pow(10.0, -Real(j));
      fd[j] = (at(h) - at(-h)) / (2 * h);
    }
    probe.params()[k] = theta;
    std::size_t best = 0;
    for (std::size_t j = 1; j + 1 < fd.size(); ++j)
      if (std::abs(fd[j] - fd[j + 1]) < std::abs(fd[best] - fd[best + 1]))
        best = j;
    Real const fdv = fd[best];
    Real const g = base.grad[k];
    Real const denom = std::max({std::abs(g), std::abs(fdv), 1e-3 * gscale, 1e-300});
    rep.max_rel_error = std::max(rep.max_rel_error, std::abs(g - fdv) / denom);
    ++rep.n_checked;
  }
  rep.pass = rep.max_rel_error <= tol;
  return rep;
}

} // namespace ensure
