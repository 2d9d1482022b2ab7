#include "ensure/net/checkpoint.hpp"

#include "ensure/data/binio.hpp"

#include <fstream>
#include <stdexcept>

namespace ensure {

void save_checkpoint(std::filesystem::path const &path, ReconNetwork const &net, std::string const &metadata_json)
{
  ByteWriter w;
  w.bytes("ENSC", 4);
  w.u32(kCheckpointVersion);
  auto const &c = net.config();
  w.u32(std::uint32_t(c.n_layers));
  w.u32(std::uint32_t(c.features));
  w.u32(std::uint32_t(c.n_unrolls));
  w.u32(std::uint32_t(c.dc_iters));
  w.u32(c.dc_adaptive ? 1u : 0u);
  w.f64(c.dc_lambda);
  w.f64(c.dc_tol);
  w.u64(std::uint64_t(net.size()));
  for (Real p : net.params())
    w.f64(p);
  write_file(path, w.data());
  std::ofstream meta(path.string() + ".json", std::ios::binary);
  meta << metadata_json << '\n';
  if (!meta)
    throw std::runtime_error("cannot write checkpoint metadata next to " + path.string());
}

auto load_checkpoint(std::filesystem::path const &path) -> ReconNetwork
{
  auto const buf = read_file(path);
  ByteReader r(buf, path.string());
  if (r.str(4) != "ENSC")
    throw FormatError(path.string() + ": not a checkpoint (bad magic)");
  auto const version = r.u32();
  if (version != kCheckpointVersion)
    throw FormatError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  NetConfig c;
  c.n_layers = int(r.u32());
  c.features = int(r.u32());
  c.n_unrolls = int(r.u32());
  c.dc_iters = int(r.u32());
  c.dc_adaptive = r.u32() != 0;
  c.dc_lambda = r.f64();
  c.dc_tol = r.f64();
  auto const n = r.u64();
  c.validate();
  if (Index(n) != parameter_count(c))
    throw FormatError(path.string() + ": parameter count does not match the stored configuration");
  std::vector<Real> p(n);
  for (auto &v : p)
    v = r.f64();
  if (!r.done())
    throw FormatError(path.string() + ": trailing bytes after parameters");
  return ReconNetwork(c, std::move(p));
}

} // namespace ensure
