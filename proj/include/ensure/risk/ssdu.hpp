#pragma once

#include "ensure/risk/losses.hpp"

namespace ensure {

struct SsduPartition
{
  SamplingMask dc_mask;
  SamplingMask loss_mask;
  Real ratio = 0.8;
};

// Uniformly random split of the sampled locations, round(ratio * n) of them
// (at least one, at most n - 1) going to the data-consistency set.
auto ssdu_partition(SamplingMask const &mask, Real ratio, Rng &rng) -> SsduPartition;

// Keeps only the entries of y sampled in mask.
auto restrict_kspace(KSpace y, SamplingMask const &mask) -> KSpace;

struct SsduSplit
{
  MeasurementOperator dc_op;
  MeasurementOperator loss_op;
  KSpace y_dc;
  KSpace y_loss;
  ComplexImage u; // A_dc^H y_dc, the network input
};

auto split_acquisition(Acquisition const &acq, SsduPartition const &part) -> SsduSplit;

// ||A_loss f(u_dc) - y_loss||^2; f sees only the dc measurements.
auto ssdu_loss(ReconMap const &f, std::span<Acquisition const> batch, std::span<SsduPartition const> parts)
  -> LossEstimate;

} // namespace ensure
