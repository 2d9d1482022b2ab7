#include "ensure/risk/divergence.hpp"

#include <cmath>
#include <stdexcept>

namespace ensure {

auto to_string(ProbeKind k) -> std::string { return k == ProbeKind::Gaussian ? "gaussian" : "rademacher"; }

auto parse_probe_kind(std::string const &s) -> ProbeKind
{
  if (s == "gaussian")
    return ProbeKind::Gaussian;
  if (s == "rademacher")
    return ProbeKind::Rademacher;
  throw std::invalid_argument("unknown probe kind '" + s + "' (expected gaussian or rademacher)");
}

void validate(DivergenceConfig const &cfg)
{
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon))
    throw std::invalid_argument("divergence: epsilon must be a positive finite number");
  if (cfg.n_probes < 1)
    throw std::invalid_argument("divergence: n_probes must be >= 1");
}

auto probe_vector(Shape shape, ProbeKind kind, Rng &rng) -> ComplexImage
{
  ComplexImage b(shape);
  for (Index i = 0; i < b.size(); ++i) {
    if (kind == ProbeKind::Gaussian) {
      Real const re = rng.normal();
      b[i] = Cx{re, rng.normal()};
    } else {
      Real const re = rng.bernoulli(0.5) ? 1.0 : -1.0;
      b[i] = Cx{re, rng.bernoulli(0.5) ? 1.0 : -1.0};
    }
  }
  return b;
}

auto perturbation_scale(ComplexImage const &u, DivergenceConfig const &cfg) -> Real
{
  Real const r = rms(u);
  return r > 0.0 ? cfg.epsilon * r : cfg.epsilon;
}

auto mc_divergence(ImageMap const &f, ComplexImage const &u, DivergenceConfig const &cfg, Rng &rng) -> Real
{
  return mc_divergence(f, nullptr, u, cfg, rng);
}

auto mc_divergence(ImageMap const &f, ImageMap const &gram, ComplexImage const &u, DivergenceConfig const &cfg,
                   Rng &rng) -> Real
{
  validate(cfg);
  Real const eps = perturbation_scale(u, cfg);
  ComplexImage const f0 = f(u);
  Real acc = 0.0;
  for (int k = 0; k < cfg.n_probes; ++k) {
    ComplexImage b = probe_vector(u.shape(), cfg.probe, rng);
    ComplexImage up = u;
    up.axpy(eps, b);
    ComplexImage diff = f(up);
    diff -= f0;
    acc += real_inner(gram ? gram(b) : b, diff);
  }
  return acc / (eps * cfg.n_probes);
}

} // namespace ensure
