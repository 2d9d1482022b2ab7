#pragma once

#include "ensure/core/rng.hpp"

#include <functional>
#include <string>

namespace ensure {

using ImageMap = std::function<ComplexImage(ComplexImage const &)>;

enum class ProbeKind
{
  Gaussian,   // b ~ N(0, I) in the real-stacked representation
  Rademacher, // +-1 per real component; lower variance, exact for f = identity
};

auto to_string(ProbeKind k) -> std::string;
auto parse_probe_kind(std::string const &s) -> ProbeKind;

struct DivergenceConfig
{
  Real epsilon = 1e-3; // relative to RMS(u)
  int n_probes = 1;
  ProbeKind probe = ProbeKind::Gaussian;
};

void validate(DivergenceConfig const &cfg);

auto probe_vector(Shape shape, ProbeKind kind, Rng &rng) -> ComplexImage;

// epsilon * RMS(u), or epsilon itself when u = 0.
auto perturbation_scale(ComplexImage const &u, DivergenceConfig const &cfg) -> Real;

// (1 / (K eps)) sum_k <b_k, f(u + eps b_k) - f(u)>, real-stacked.
auto mc_divergence(ImageMap const &f, ComplexImage const &u, DivergenceConfig const &cfg, Rng &rng) -> Real;

// Divergence of u -> G f(u) for a fixed symmetric linear G:
// (1 / (K eps)) sum_k <G b_k, f(u + eps b_k) - f(u)>.
auto mc_divergence(ImageMap const &f, ImageMap const &gram, ComplexImage const &u, DivergenceConfig const &cfg,
                   Rng &rng) -> Real;

} // namespace ensure
