#pragma once

#include "ensure/forward/operator.hpp"

#include <filesystem>
#include <stdexcept>

namespace ensure {

inline constexpr int kDatasetSchemaVersion = 1;

struct DatasetConfig
{
  Index n_train = 50;
  Index n_val = 10;
  Index n_test = 10;
  Shape shape{32, 32};
  Index n_coils = 1;
  DensityKind density = DensityKind::GaussianVardens;
  Real accel = 4.0;
  Real sigma = 0.03;
  bool single_mask = false; // GSURE configuration: every image shares one mask
  std::uint64_t seed = 1;
  // Released unsupervised sets ship without gt.bin.
  bool write_ground_truth = true;

  void validate() const;
  [[nodiscard]] auto n_total() const -> Index { return n_train + n_val + n_test; }
};

enum class Split
{
  Train,
  Val,
  Test,
};

enum class Access
{
  Supervised,
  Unsupervised,
};

auto to_string(Split s) -> std::string;

// Thrown on any attempt to read ground truth through a blinded handle.
class BlindedAccess : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

struct IndexRange
{
  Index begin = 0;
  Index end = 0;
  [[nodiscard]] auto size() const -> Index { return end - begin; }
};

// Samples are stored train, then val, then test.
class Dataset
{
public:
  Dataset(DatasetConfig cfg, MaskEnsemble ensemble, std::vector<Index> mask_ids, std::vector<CoilMaps> coils,
          std::vector<KSpace> y, std::vector<ComplexImage> gt, std::vector<Real> zero_filled_psnr, Access access);

  [[nodiscard]] auto config() const -> DatasetConfig const & { return cfg_; }
  [[nodiscard]] auto access() const -> Access { return access_; }
  [[nodiscard]] auto size() const -> Index { return cfg_.n_total(); }
  [[nodiscard]] auto range(Split s) const -> IndexRange;
  [[nodiscard]] auto ensemble() const -> MaskEnsemble const & { return ensemble_; }
  [[nodiscard]] auto density() const -> DensityMap const & { return ensemble_.density; }
  [[nodiscard]] auto mask_id(Index i) const -> Index { return mask_ids_.at(std::size_t(i)); }
  [[nodiscard]] auto mask_ids() const -> std::vector<Index> const & { return mask_ids_; }
  [[nodiscard]] auto op(Index i) const -> MeasurementOperator;
  [[nodiscard]] auto y(Index i) const -> KSpace const & { return y_.at(std::size_t(i)); }
  [[nodiscard]] auto zero_filled_psnr(Index i) const -> Real { return zf_psnr_.at(std::size_t(i)); }
  [[nodiscard]] auto zero_filled_psnr() const -> std::vector<Real> const & { return zf_psnr_; }

  // True when the files carry ground truth, whatever the access mode.
  [[nodiscard]] auto stores_ground_truth() const -> bool { return !gt_.empty(); }
  // Every call is counted, including refused ones.
  [[nodiscard]] auto ground_truth(Index i) const -> ComplexImage const &;
  [[nodiscard]] auto ground_truth_reads() const -> Index { return gt_reads_; }

  [[nodiscard]] auto coils() const -> std::vector<CoilMaps> const & { return coils_; }

private:
  DatasetConfig cfg_;
  MaskEnsemble ensemble_;
  std::vector<Index> mask_ids_;
  std::vector<CoilMaps> coils_; // empty for single-coil data
  std::vector<KSpace> y_;
  std::vector<ComplexImage> gt_;
  std::vector<Real> zf_psnr_;
  Access access_;
  mutable Index gt_reads_ = 0;
};

// Draws phantoms, masks (one per image, or one shared), coils and noisy
// measurements, all from cfg.seed, and writes them to out_dir.
auto gen_dataset(DatasetConfig const &cfg, std::filesystem::path const &out_dir) -> Dataset;
// Same arrays without touching the disk.
auto make_dataset(DatasetConfig const &cfg) -> Dataset;
void write_dataset(Dataset const &ds, std::filesystem::path const &out_dir);
auto load_dataset(std::filesystem::path const &dir, Access access) -> Dataset;

} // namespace ensure
