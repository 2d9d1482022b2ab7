#include "ensure/cli/commands.hpp"
#include "ensure/cli/config.hpp"
#include "ensure/cli/experiment.hpp"
#include "ensure/data/binio.hpp"
#include "ensure/metrics/report.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace ensure;
namespace fs = std::filesystem;

namespace {

auto scratch(std::string const &name) -> fs::path
{
  auto p = fs::temp_directory_path() / ("ensure_cli_" + name);
  fs::remove_all(p);
  return p;
}

// Runs the CLI with stdout/stderr captured.
struct Run
{
  int code;
  std::string out, err;
};

auto cli(std::vector<std::string> const &args) -> Run
{
  std::ostringstream o, e;
  auto *ob = std::cout.rdbuf(o.rdbuf());
  auto *eb = std::cerr.rdbuf(e.rdbuf());
  int const code = run_cli(args);
  std::cout.rdbuf(ob);
  std::cerr.rdbuf(eb);
  return {code, o.str(), e.str()};
}

auto small_data(fs::path const &dir, std::vector<std::string> extra = {}) -> Run
{
  std::vector<std::string> a{"gen-data", "--shape", "16", "--accel", "4", "--sigma", "0.03", "--n-train", "3",
                             "--n-val", "1", "--n-test", "2", "--seed", "1", "--out", dir.string()};
  a.insert(a.end(), extra.begin(), extra.end());
  return cli(a);
}

auto to_text(std::vector<std::uint8_t> const &b) -> std::string
{
  return {b.begin(), b.end()};
}

} // namespace

TEST_CASE("config documents")
{
  CHECK_THROWS_AS(parse_config("{}"), UsageError);
  CHECK_THROWS_AS(parse_config(R"({"version": 2})"), UsageError);
  CHECK_THROWS_AS(parse_config(R"({"version": 1, "bogus": 0})"), UsageError);
  CHECK_THROWS_AS(parse_config(R"({"version": 1, "net": {"depth": 3}})"), UsageError);
  CHECK_THROWS_AS(parse_config(R"({"version": 1, "loss": {"kind": "nope"}})"), UsageError);
  CHECK_THROWS_AS(parse_config(R"({"version": 1, "train": {"lr": "fast"}})"), UsageError);
  CHECK_THROWS_AS(parse_config("not json"), UsageError);

  auto c = parse_config(R"({"version": 1, "data": {"shape": [24, 32], "accel": 2, "density": "cartesian-lines"},
                            "loss": {"kind": "ssdu"}, "train": {"epochs": 7, "net_seed": 4}})");
  CHECK(c.data.shape == Shape{24, 32});
  CHECK(c.data.density == DensityKind::CartesianLines);
  CHECK(c.loss.kind == LossKind::Ssdu);
  CHECK(c.loss.ssdu_ratio == 0.8);
  CHECK(c.train.epochs == 7);
  CHECK(c.net_seed == 4);

  // the resolved document parses back to the same configuration
  auto back = parse_config(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(back.net == c.net);
  CHECK(back.data.shape == c.data.shape);
}

TEST_CASE("usage errors exit with 2")
{
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"gen-data", "--shape", "16"}).code == 2); // no --out
  CHECK(cli({"gen-data", "--out", scratch("bad").string(), "--density", "spiral"}).code == 2);
  CHECK(cli({"gen-data", "--out", scratch("bad").string(), "--shape", "16x"}).code == 2);
  CHECK(cli({"verify", "nonsense"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("gen-data is deterministic and records its configuration")
{
  auto a = scratch("gen_a"), b = scratch("gen_b");
  REQUIRE(small_data(a).code == 0);
  REQUIRE(small_data(b).code == 0);
  for (auto const *f : {"manifest.json", "masks.bin", "y.bin", "gt.bin", "coils.bin", "config.resolved.json"}) {
    CAPTURE(f);
    CHECK(read_file(a / f) == read_file(b / f));
  }
  auto cfg = load_config(a / "config.resolved.json");
  CHECK(cfg.data.shape == Shape{16, 16});
  CHECK(cfg.data.n_train == 3);

  // flags override the config file
  auto cf = scratch("gen_cfg");
  fs::create_directories(cf);
  {
    std::ofstream(cf / "c.json") << R"({"version": 1, "data": {"n_train": 2, "n_val": 0, "n_test": 1, "shape": 16, "sigma": 0.1}})";
  }
  REQUIRE(cli({"gen-data", "--config", (cf / "c.json").string(), "--sigma", "0.05", "--out", (cf / "d").string()}).code == 0);
  auto r = load_config(cf / "d" / "config.resolved.json");
  CHECK(r.data.n_train == 2);
  CHECK(r.data.sigma == 0.05);
}

TEST_CASE("train, then eval")
{
  auto d = scratch("data");
  REQUIRE(small_data(d).code == 0);
  auto run = scratch("run");
  auto t = cli({"train", "--data", d.string(), "--out", run.string(), "--loss", "ensure", "--variant", "projected",
                "--epochs", "2", "--features", "4", "--layers", "3", "--unrolls", "2"});
  INFO(t.err);
  REQUIRE(t.code == 0);
  for (auto const *f : {"checkpoint.bin", "checkpoint.bin.json", "log.csv", "config.resolved.json"})
    CHECK(fs::exists(run / f));
  auto cfg = load_config(run / "config.resolved.json");
  CHECK(cfg.loss.kind == LossKind::Ensure);
  CHECK(cfg.net.features == 4);
  auto log = csv_parse(to_text(read_file(run / "log.csv")));
  CHECK(log.size() == 3); // header + 2 epochs

  auto ev = scratch("eval");
  auto e = cli({"eval", "--data", d.string(), "--checkpoint", (run / "checkpoint.bin").string(), "--out", ev.string()});
  INFO(e.err);
  REQUIRE(e.code == 0);
  auto rows = read_table(ev / "metrics.csv");
  CHECK(rows.size() == 3); // n_test + aggregate
  CHECK(rows.back().method == "ensure");

  // a config whose network disagrees with the checkpoint is refused
  {
    std::ofstream(ev / "c.json") << R"({"version": 1, "net": {"features": 8}})";
  }
  CHECK(cli({"eval", "--data", d.string(), "--checkpoint", (run / "checkpoint.bin").string(), "--config",
             (ev / "c.json").string(), "--out", ev.string()})
          .code == 1);
  CHECK(cli({"eval", "--data", d.string(), "--checkpoint", (run / "missing.bin").string(), "--out", ev.string()})
          .code == 1);
  CHECK(cli({"eval", "--data", d.string(), "--out", ev.string()}).code == 2); // neither --checkpoint nor --identity
}

TEST_CASE("eval of the zero-filled passthrough reproduces the stored PSNR")
{
  auto d = scratch("zf");
  REQUIRE(small_data(d).code == 0);
  auto ev = scratch("zf_eval");
  REQUIRE(cli({"eval", "--data", d.string(), "--identity", "--out", ev.string()}).code == 0);
  auto rows = read_table(ev / "metrics.csv");
  auto ds = load_dataset(d, Access::Supervised);
  auto r = ds.range(Split::Test);
  REQUIRE(rows.size() == std::size_t(r.size() + 1));
  for (Index i = 0; i < r.size(); ++i)
    CHECK(rows[std::size_t(i)].psnr_mean == doctest::Approx(ds.zero_filled_psnr(r.begin + i)).epsilon(1e-12));
}

TEST_CASE("supervised training needs ground truth")
{
  auto d = scratch("nogt");
  REQUIRE(small_data(d, {"--no-ground-truth"}).code == 0);
  CHECK_FALSE(fs::exists(d / "gt.bin"));
  auto r = cli({"train", "--data", d.string(), "--out", scratch("nogt_run").string(), "--loss", "sup", "--epochs", "1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("gt.bin") != std::string::npos);
  // unsupervised losses still train
  CHECK(cli({"train", "--data", d.string(), "--out", scratch("nogt_run2").string(), "--loss", "ssdu", "--epochs", "1",
             "--features", "4", "--layers", "3"})
          .code == 0);
  CHECK(cli({"train", "--data", scratch("nowhere").string(), "--out", scratch("x").string()}).code == 1);
}

TEST_CASE("verify writes a report and sets the exit code")
{
  auto out = scratch("verify");
  auto r = cli({"verify", "lemma1", "--n", "8", "--seed", "3", "--out", out.string()});
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(to_text(read_file(out / "verify.json")));
  CHECK(j.at("pass").get<bool>());
  auto const &checks = j.at("suites").at(0).at("checks");
  CHECK(checks.size() >= 4);
  for (auto const &c : checks) {
    CHECK(c.contains("statistic"));
    CHECK(c.contains("tolerance"));
    CHECK(c.at("pass").get<bool>());
  }
  CHECK(cli({"verify", "sure", "--draws", "200"}).code == 0);
  CHECK(cli({"verify", "lemma1", "--n", "20"}).code == 2);
}
