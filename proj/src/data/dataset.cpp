#include "ensure/data/dataset.hpp"

#include "ensure/data/binio.hpp"
#include "ensure/data/phantom.hpp"
#include "ensure/metrics/metrics.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace ensure {

namespace {

using json = nlohmann::ordered_json;

// stream ids off the dataset seed
constexpr std::uint64_t kPhantomStream = 0x70686e74;
constexpr std::uint64_t kCoilStream = 0x636f696c;
constexpr std::uint64_t kNoiseStream = 0x6e6f6973;
constexpr std::uint64_t kMaskSalt = 0x6d61736b;

auto mask_seed(std::uint64_t seed) -> std::uint64_t { return Rng(seed ^ kMaskSalt).next_u64(); }

void append(std::vector<Cx> &dst, ComplexImage const &img)
{
  dst.insert(dst.end(), img.values().begin(), img.values().end());
}

auto slice(std::vector<Cx> const &src, std::size_t offset, Shape sh) -> ComplexImage
{
  auto const b = src.begin() + std::ptrdiff_t(offset);
  return ComplexImage(sh, std::vector<Cx>(b, b + sh.size()));
}

} // namespace

auto to_string(Split s) -> std::string
{
  switch (s) {
  case Split::Train: return "train";
  case Split::Val: return "val";
  case Split::Test: return "test";
  }
  return "?";
}

void DatasetConfig::validate() const
{
  if (n_train < 0 || n_val < 0 || n_test < 0 || n_total() == 0)
    throw std::invalid_argument("dataset: split sizes must be >= 0 and not all zero");
  if (shape.rows < 16 || shape.cols < 16)
    throw std::invalid_argument("dataset: shape must be at least 16x16");
  if (n_coils < 1)
    throw std::invalid_argument("dataset: n_coils must be >= 1");
  if (!(accel >= 1.0))
    throw std::invalid_argument("dataset: acceleration must be >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("dataset: sigma must be finite and >= 0");
}

Dataset::Dataset(DatasetConfig cfg, MaskEnsemble ensemble, std::vector<Index> mask_ids, std::vector<CoilMaps> coils,
                 std::vector<KSpace> y, std::vector<ComplexImage> gt, std::vector<Real> zero_filled_psnr,
                 Access access)
  : cfg_(std::move(cfg)), ensemble_(std::move(ensemble)), mask_ids_(std::move(mask_ids)), coils_(std::move(coils)),
    y_(std::move(y)), gt_(std::move(gt)), zf_psnr_(std::move(zero_filled_psnr)), access_(access)
{
  auto const n = std::size_t(cfg_.n_total());
  if (mask_ids_.size() != n || y_.size() != n || zf_psnr_.size() != n)
    throw FormatError("dataset: per-sample arrays disagree with the split sizes");
  if (!gt_.empty() && gt_.size() != n)
    throw FormatError("dataset: ground truth count does not match");
  if (cfg_.n_coils > 1 && coils_.size() != n)
    throw FormatError("dataset: coil map count does not match");
  for (Index id : mask_ids_)
    if (id < 0 || id >= ensemble_.size())
      throw FormatError("dataset: mask id " + std::to_string(id) + " not in the ensemble");
  if (access_ == Access::Supervised && gt_.empty())
    throw BlindedAccess("dataset: supervised access requested but the dataset has no ground truth (gt.bin)");
}

auto Dataset::range(Split s) const -> IndexRange
{
  switch (s) {
  case Split::Train: return {0, cfg_.n_train};
  case Split::Val: return {cfg_.n_train, cfg_.n_train + cfg_.n_val};
  case Split::Test: return {cfg_.n_train + cfg_.n_val, cfg_.n_total()};
  }
  return {};
}

auto Dataset::op(Index i) const -> MeasurementOperator
{
  std::optional<CoilMaps> c;
  if (cfg_.n_coils > 1)
    c = coils_.at(std::size_t(i));
  return MeasurementOperator(ensemble_.at(mask_id(i)), std::move(c), cfg_.sigma, i);
}

auto Dataset::ground_truth(Index i) const -> ComplexImage const &
{
  ++gt_reads_;
  if (access_ == Access::Unsupervised)
    throw BlindedAccess("ground truth of sample " + std::to_string(i) + " requested through an unsupervised handle");
  return gt_.at(std::size_t(i));
}

auto make_dataset(DatasetConfig const &cfg) -> Dataset
{
  cfg.validate();
  auto const n = cfg.n_total();
  auto ensemble = make_ensemble(make_density(cfg.density, cfg.shape, cfg.accel), cfg.single_mask ? 1 : n,
                                mask_seed(cfg.seed), cfg.single_mask);

  std::vector<Index> ids(std::size_t(n), 0);
  std::vector<CoilMaps> coils;
  std::vector<KSpace> ys;
  std::vector<ComplexImage> gts;
  std::vector<Real> zf;
  Rng const phantoms(cfg.seed, kPhantomStream), coil_rng(cfg.seed, kCoilStream), noise(cfg.seed, kNoiseStream);
  for (Index i = 0; i < n; ++i) {
    ids[std::size_t(i)] = cfg.single_mask ? 0 : i;
    Rng pr = phantoms.substream(std::uint64_t(i));
    ComplexImage rho = gen_phantom(cfg.shape, pr);
    std::optional<CoilMaps> c;
    if (cfg.n_coils > 1) {
      Rng cr = coil_rng.substream(std::uint64_t(i));
      c = simulate_coils(cfg.n_coils, cfg.shape, cr);
      coils.push_back(*c);
    }
    MeasurementOperator op(ensemble.at(ids[std::size_t(i)]), c, cfg.sigma, i);
    Rng nr = noise.substream(std::uint64_t(i));
    KSpace y = add_noise(op.apply(rho), op.mask(), cfg.sigma, nr);
    zf.push_back(psnr(rho, op.adjoint(y)));
    ys.push_back(std::move(y));
    gts.push_back(std::move(rho));
  }
  return Dataset(cfg, std::move(ensemble), std::move(ids), std::move(coils), std::move(ys), std::move(gts),
                 std::move(zf), Access::Supervised);
}

void write_dataset(Dataset const &ds, std::filesystem::path const &out_dir)
{
  auto const &cfg = ds.config();
  std::filesystem::create_directories(out_dir);
  Shape const sh = cfg.shape;

  ArrayFile masks{ElementKind::U8, std::uint32_t(ds.ensemble().size()), {}, {}};
  for (auto const &m : ds.ensemble().masks)
    masks.u8.insert(masks.u8.end(), m.bits().begin(), m.bits().end());
  write_array_file(out_dir / "masks.bin", masks);

  ArrayFile coils{ElementKind::Complex128, std::uint32_t(ds.coils().size()), {}, {}};
  for (auto const &c : ds.coils())
    for (auto const &m : c.maps)
      append(coils.c128, m);
  write_array_file(out_dir / "coils.bin", coils);

  ArrayFile y{ElementKind::Complex128, std::uint32_t(ds.size()), {}, {}};
  for (Index i = 0; i < ds.size(); ++i)
    for (auto const &ch : ds.y(i).channels)
      append(y.c128, ch);
  write_array_file(out_dir / "y.bin", y);

  bool const with_gt = cfg.write_ground_truth && ds.stores_ground_truth();
  std::filesystem::remove(out_dir / "gt.bin");
  if (with_gt) {
    if (ds.access() != Access::Supervised)
      throw BlindedAccess("write_dataset: cannot export ground truth from a blinded handle");
    ArrayFile gt{ElementKind::Complex128, std::uint32_t(ds.size()), {}, {}};
    for (Index i = 0; i < ds.size(); ++i)
      append(gt.c128, ds.ground_truth(i));
    write_array_file(out_dir / "gt.bin", gt);
  }

  json m;
  m["schema_version"] = kDatasetSchemaVersion;
  m["shape"] = {sh.rows, sh.cols};
  m["n_coils"] = cfg.n_coils;
  m["sigma"] = cfg.sigma;
  m["density"] = to_string(cfg.density);
  m["accel"] = cfg.accel;
  m["mask_mode"] = cfg.single_mask ? "single" : "ensemble";
  m["seeds"] = {{"dataset", cfg.seed}, {"masks", ds.ensemble().seed}};
  m["splits"] = {{"train", cfg.n_train}, {"val", cfg.n_val}, {"test", cfg.n_test}};
  m["n_masks"] = ds.ensemble().size();
  m["mask_ids"] = ds.mask_ids();
  m["zero_filled_psnr"] = ds.zero_filled_psnr();
  m["has_ground_truth"] = with_gt;
  std::ofstream out(out_dir / "manifest.json", std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot create " + (out_dir / "manifest.json").string());
  out << m.dump(2) << '\n';
}

auto gen_dataset(DatasetConfig const &cfg, std::filesystem::path const &out_dir) -> Dataset
{
  auto ds = make_dataset(cfg);
  write_dataset(ds, out_dir);
  return ds;
}

auto load_dataset(std::filesystem::path const &dir, Access access) -> Dataset
{
  auto const mpath = dir / "manifest.json";
  std::ifstream in(mpath);
  if (!in)
    throw FormatError("missing dataset manifest " + mpath.string());
  json m;
  try {
    m = json::parse(in);
  } catch (json::exception const &e) {
    throw FormatError(mpath.string() + ": " + e.what());
  }
  DatasetConfig cfg;
  std::vector<Index> ids;
  std::vector<Real> zf;
  bool has_gt = false;
  Index n_masks = 0;
  std::uint64_t mseed = 0;
  try {
    if (int v = m.at("schema_version").get<int>(); v != kDatasetSchemaVersion)
      throw FormatError(mpath.string() + ": unsupported schema_version " + std::to_string(v));
    cfg.shape = {m.at("shape").at(0).get<Index>(), m.at("shape").at(1).get<Index>()};
    cfg.n_coils = m.at("n_coils").get<Index>();
    cfg.sigma = m.at("sigma").get<Real>();
    cfg.density = parse_density_kind(m.at("density").get<std::string>());
    cfg.accel = m.at("accel").get<Real>();
    auto const mode = m.at("mask_mode").get<std::string>();
    if (mode != "single" && mode != "ensemble")
      throw FormatError(mpath.string() + ": unknown mask_mode '" + mode + "'");
    cfg.single_mask = mode == "single";
    cfg.seed = m.at("seeds").at("dataset").get<std::uint64_t>();
    mseed = m.at("seeds").at("masks").get<std::uint64_t>();
    cfg.n_train = m.at("splits").at("train").get<Index>();
    cfg.n_val = m.at("splits").at("val").get<Index>();
    cfg.n_test = m.at("splits").at("test").get<Index>();
    n_masks = m.at("n_masks").get<Index>();
    ids = m.at("mask_ids").get<std::vector<Index>>();
    for (auto const &v : m.at("zero_filled_psnr"))
      zf.push_back(v.is_null() ? kPsnrIdentical : v.get<Real>());
    has_gt = m.at("has_ground_truth").get<bool>();
  } catch (json::exception const &e) {
    throw FormatError(mpath.string() + ": " + e.what());
  }
  cfg.write_ground_truth = has_gt;
  cfg.validate();
  Shape const sh = cfg.shape;
  auto const n = cfg.n_total();

  auto const mf = read_array_file(dir / "masks.bin", ElementKind::U8, std::size_t(sh.size()));
  if (Index(mf.count) != n_masks)
    throw FormatError("masks.bin: " + std::to_string(mf.count) + " masks, manifest says " + std::to_string(n_masks));
  MaskEnsemble ens{make_density(cfg.density, sh, cfg.accel), {}, mseed, cfg.single_mask};
  for (std::uint32_t k = 0; k < mf.count; ++k) {
    auto const b = mf.u8.begin() + std::ptrdiff_t(k * sh.size());
    ens.masks.emplace_back(sh, std::vector<std::uint8_t>(b, b + sh.size()));
  }

  std::vector<CoilMaps> coils;
  auto const cf = read_array_file(dir / "coils.bin", ElementKind::Complex128, std::size_t(cfg.n_coils * sh.size()));
  if (cfg.n_coils > 1) {
    if (Index(cf.count) != n)
      throw FormatError("coils.bin: expected " + std::to_string(n) + " records");
    for (Index i = 0; i < n; ++i) {
      CoilMaps c;
      for (Index j = 0; j < cfg.n_coils; ++j)
        c.maps.push_back(slice(cf.c128, std::size_t((i * cfg.n_coils + j) * sh.size()), sh));
      coils.push_back(std::move(c));
    }
  } else if (cf.count != 0) {
    throw FormatError("coils.bin: single-coil dataset with coil maps");
  }

  auto const yf = read_array_file(dir / "y.bin", ElementKind::Complex128, std::size_t(cfg.n_coils * sh.size()));
  if (Index(yf.count) != n)
    throw FormatError("y.bin: expected " + std::to_string(n) + " records");
  std::vector<KSpace> ys;
  for (Index i = 0; i < n; ++i) {
    KSpace y;
    for (Index j = 0; j < cfg.n_coils; ++j)
      y.channels.push_back(slice(yf.c128, std::size_t((i * cfg.n_coils + j) * sh.size()), sh));
    ys.push_back(std::move(y));
  }

  std::vector<ComplexImage> gts;
  // a blinded handle never holds the arrays at all
  if (has_gt && access == Access::Supervised) {
    auto const gf = read_array_file(dir / "gt.bin", ElementKind::Complex128, std::size_t(sh.size()));
    if (Index(gf.count) != n)
      throw FormatError("gt.bin: expected " + std::to_string(n) + " records");
    for (Index i = 0; i < n; ++i)
      gts.push_back(slice(gf.c128, std::size_t(i * sh.size()), sh));
  }
  if (access == Access::Supervised && !has_gt)
    throw BlindedAccess("dataset " + dir.string() + " has no ground truth (gt.bin); supervised access is impossible");

  return Dataset(cfg, std::move(ens), std::move(ids), std::move(coils), std::move(ys), std::move(gts), std::move(zf),
                 access);
}

} // namespace ensure
