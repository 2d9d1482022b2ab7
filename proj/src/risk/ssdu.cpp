#include "ensure/risk/ssdu.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace ensure {

auto ssdu_partition(SamplingMask const &mask, Real ratio, Rng &rng) -> SsduPartition
{
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::invalid_argument("ssdu_partition: ratio must lie strictly between 0 and 1 (got " +
                                std::to_string(ratio) + ")");
  auto idx = mask.sampled_indices();
  auto const n = static_cast<Index>(idx.size());
  if (n < 2)
    throw std::invalid_argument("ssdu_partition: need at least two sampled locations");
  // Fisher-Yates
  for (Index i = n - 1; i > 0; --i)
    std::swap(idx[i], idx[rng.uniform_index(std::uint64_t(i + 1))]);
  Index const n_dc = std::clamp<Index>(std::llround(ratio * Real(n)), 1, n - 1);
  std::vector<std::uint8_t> dc(mask.shape().size(), 0), loss(mask.shape().size(), 0);
  for (Index i = 0; i < n; ++i)
    (i < n_dc ? dc : loss)[idx[i]] = 1;
  return {SamplingMask(mask.shape(), std::move(dc)), SamplingMask(mask.shape(), std::move(loss)), ratio};
}

auto restrict_kspace(KSpace y, SamplingMask const &mask) -> KSpace
{
  for (auto &ch : y.channels) {
    require_same_shape(ch.shape(), mask.shape(), "restrict_kspace");
    for (Index i = 0; i < ch.size(); ++i)
      if (!mask[i])
        ch[i] = Cx{0.0, 0.0};
  }
  return y;
}

auto split_acquisition(Acquisition const &acq, SsduPartition const &part) -> SsduSplit
{
  auto const &m = acq.op.mask();
  for (Index i = 0; i < m.shape().size(); ++i)
    if ((part.dc_mask[i] || part.loss_mask[i]) != m[i] || (part.dc_mask[i] && part.loss_mask[i]))
      throw std::invalid_argument("ssdu: partition does not split the acquisition mask");
  SsduSplit s{acq.op.with_mask(part.dc_mask), acq.op.with_mask(part.loss_mask),
              restrict_kspace(acq.y, part.dc_mask), restrict_kspace(acq.y, part.loss_mask), {}};
  s.u = s.dc_op.adjoint(s.y_dc);
  return s;
}

auto ssdu_loss(ReconMap const &f, std::span<Acquisition const> batch, std::span<SsduPartition const> parts)
  -> LossEstimate
{
  if (batch.size() != parts.size() || batch.empty())
    throw std::invalid_argument("ssdu_loss: need one partition per sample and a non-empty batch");
  LossEstimate e;
  e.kind = LossKind::Ssdu;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    auto s = split_acquisition(batch[i], parts[i]);
    auto pred = f(s.u, s.dc_op);
    e.per_sample_data.push_back(norm2(s.loss_op.apply(pred) - s.y_loss));
    e.per_sample_divergence.push_back(0.0);
  }
  e.data_term = 0;
  for (Real v : e.per_sample_data)
    e.data_term += v;
  e.data_term /= Real(batch.size());
  e.per_sample = e.per_sample_data;
  e.total = e.data_term;
  return e;
}

} // namespace ensure
