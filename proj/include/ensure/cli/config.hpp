#pragma once

#include "ensure/data/dataset.hpp"
#include "ensure/net/train.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace ensure {

inline constexpr int kConfigVersion = 1;

// Bad flags, bad config documents: exit code 2.
class UsageError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

struct LossConfig
{
  LossKind kind = LossKind::Ensure;
  EnsureVariant variant = EnsureVariant::Projected;
  WeightingMode weighting = WeightingMode::CgWeighted;
  int n_probes = 1;
  Real epsilon = 1e-3;
  ProbeKind probe = ProbeKind::Gaussian;
  Real ssdu_ratio = 0.8;
};

// Every knob of a run in one document.
struct ExperimentConfig
{
  DatasetConfig data;
  NetConfig net;
  LossConfig loss;
  TrainConfig train;
  int net_seed = 0; // network initialization
};

// JSON with a "version" field; unknown keys anywhere are rejected. Missing
// keys keep their defaults.
auto parse_config(std::string const &text) -> ExperimentConfig;
auto load_config(std::filesystem::path const &path) -> ExperimentConfig;
auto config_to_json(ExperimentConfig const &cfg) -> std::string;
void write_resolved_config(ExperimentConfig const &cfg, std::filesystem::path const &dir);

// Objective for a loss configuration on a dataset.
auto objective_for(LossConfig const &loss, DensityMap const &density, Real sigma) -> ObjectiveConfig;

} // namespace ensure
