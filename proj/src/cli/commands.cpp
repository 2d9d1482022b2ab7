#include "ensure/cli/commands.hpp"

#include "ensure/cli/experiment.hpp"
#include "ensure/cli/verify.hpp"
#include "ensure/data/binio.hpp"
#include "ensure/net/checkpoint.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

namespace ensure {

namespace fs = std::filesystem;

namespace {

// Flags bound to a scratch config; only the ones given on the command line
// are copied over the config file's values.
struct Overrides
{
  ExperimentConfig flags;
  std::vector<std::function<void(ExperimentConfig &)>> apply;
  std::vector<std::string> text; // storage for string-valued flags

  template <class Get>
  void add(CLI::App *app, std::string const &name, Get get, std::string const &desc)
  {
    auto *o = app->add_option(name, get(flags), desc);
    apply.push_back([this, o, get](ExperimentConfig &c) {
      if (o->count() > 0)
        get(c) = get(flags);
    });
  }

  void add_parsed(CLI::App *app, std::string const &name, std::function<void(ExperimentConfig &, std::string const &)> set,
                  std::string const &desc)
  {
    auto value = std::make_shared<std::string>();
    auto *o = app->add_option(name, *value, desc);
    apply.push_back([o, value, set](ExperimentConfig &c) {
      if (o->count() > 0)
        set(c, *value);
    });
  }

  void add_flag(CLI::App *app, std::string const &name, std::function<void(ExperimentConfig &)> set,
                std::string const &desc)
  {
    auto *o = app->add_flag(name, desc);
    apply.push_back([o, set](ExperimentConfig &c) {
      if (o->count() > 0)
        set(c);
    });
  }

  [[nodiscard]] auto resolve(std::string const &config_path) const -> ExperimentConfig
  {
    ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    for (auto const &f : apply)
      f(c);
    return c;
  }
};

template <class Parse>
auto parse_flag(Parse parse, std::string const &flag, std::string const &v)
{
  try {
    return parse(v);
  } catch (std::invalid_argument const &e) {
    throw UsageError(flag + ": " + e.what());
  }
}

auto parse_shape(std::string const &s) -> Shape
{
  try {
    std::size_t pos = 0;
    long const r = std::stol(s, &pos);
    if (pos == s.size())
      return {r, r};
    if (s[pos] != 'x')
      throw std::invalid_argument(s);
    std::string const rest = s.substr(pos + 1);
    long const c = std::stol(rest, &pos);
    if (pos != rest.size())
      throw std::invalid_argument(s);
    return {r, c};
  } catch (std::logic_error const &) {
    throw UsageError("--shape: expected N or RxC, got '" + s + "'");
  }
}

void add_data_flags(CLI::App *app, Overrides &ov)
{
  ov.add_parsed(app, "--shape", [](ExperimentConfig &c, std::string const &v) { c.data.shape = parse_shape(v); },
                "image size, N or RxC");
  ov.add(app, "--n-train", [](ExperimentConfig &c) -> Index & { return c.data.n_train; }, "training images");
  ov.add(app, "--n-val", [](ExperimentConfig &c) -> Index & { return c.data.n_val; }, "validation images");
  ov.add(app, "--n-test", [](ExperimentConfig &c) -> Index & { return c.data.n_test; }, "test images");
  ov.add(app, "--n-coils", [](ExperimentConfig &c) -> Index & { return c.data.n_coils; }, "receive coils (1: single channel)");
  ov.add_parsed(app, "--density",
                [](ExperimentConfig &c, std::string const &v) {
                  c.data.density = parse_flag(parse_density_kind, "--density", v);
                },
                "uniform | gaussian-vardens | cartesian-lines");
  ov.add(app, "--accel", [](ExperimentConfig &c) -> Real & { return c.data.accel; }, "acceleration factor");
  ov.add(app, "--sigma", [](ExperimentConfig &c) -> Real & { return c.data.sigma; }, "k-space noise level");
  ov.add_parsed(app, "--mask-mode",
                [](ExperimentConfig &c, std::string const &v) {
                  if (v != "ensemble" && v != "single")
                    throw UsageError("--mask-mode: expected ensemble or single, got '" + v + "'");
                  c.data.single_mask = v == "single";
                },
                "ensemble (a mask per image) | single (one shared mask)");
  ov.add(app, "--seed", [](ExperimentConfig &c) -> std::uint64_t & { return c.data.seed; }, "dataset seed");
  ov.add_flag(app, "--no-ground-truth", [](ExperimentConfig &c) { c.data.write_ground_truth = false; },
              "release measurements only (no gt.bin)");
}

void add_train_flags(CLI::App *app, Overrides &ov)
{
  ov.add_parsed(app, "--loss",
                [](ExperimentConfig &c, std::string const &v) { c.loss.kind = parse_flag(parse_loss_kind, "--loss", v); },
                "sup | kmse | ssdu | gsure | ensure");
  ov.add_parsed(app, "--variant",
                [](ExperimentConfig &c, std::string const &v) {
                  c.loss.variant = parse_flag(parse_ensure_variant, "--variant", v);
                },
                "ENSURE divergence: projected | plain");
  ov.add_parsed(app, "--weighting",
                [](ExperimentConfig &c, std::string const &v) {
                  c.loss.weighting = parse_flag(parse_weighting_mode, "--weighting", v);
                },
                "cg-weighted | closed-form | none");
  ov.add_parsed(app, "--probe",
                [](ExperimentConfig &c, std::string const &v) { c.loss.probe = parse_flag(parse_probe_kind, "--probe", v); },
                "gaussian | rademacher");
  ov.add(app, "--probes", [](ExperimentConfig &c) -> int & { return c.loss.n_probes; }, "divergence probes per image");
  ov.add(app, "--epsilon", [](ExperimentConfig &c) -> Real & { return c.loss.epsilon; }, "divergence step, relative");
  ov.add(app, "--ssdu-ratio", [](ExperimentConfig &c) -> Real & { return c.loss.ssdu_ratio; }, "SSDU data-consistency share");
  ov.add(app, "--epochs", [](ExperimentConfig &c) -> int & { return c.train.epochs; }, "training epochs");
  ov.add(app, "--lr", [](ExperimentConfig &c) -> Real & { return c.train.lr; }, "Adam step size");
  ov.add(app, "--batch", [](ExperimentConfig &c) -> int & { return c.train.batch; }, "images per step");
  ov.add(app, "--seed", [](ExperimentConfig &c) -> std::uint64_t & { return c.train.seed; }, "shuffle/probe seed");
  ov.add(app, "--net-seed", [](ExperimentConfig &c) -> int & { return c.net_seed; }, "initialization seed");
  ov.add(app, "--layers", [](ExperimentConfig &c) -> int & { return c.net.n_layers; }, "CNN layers");
  ov.add(app, "--features", [](ExperimentConfig &c) -> int & { return c.net.features; }, "CNN channels");
  ov.add(app, "--unrolls", [](ExperimentConfig &c) -> int & { return c.net.n_unrolls; }, "unrolled iterations");
  ov.add(app, "--dc-lambda", [](ExperimentConfig &c) -> Real & { return c.net.dc_lambda; }, "DC regularization weight");
  ov.add(app, "--dc-iters", [](ExperimentConfig &c) -> int & { return c.net.dc_iters; }, "DC CG iterations");
}

auto has_ground_truth(fs::path const &dir) -> bool
{
  return fs::exists(dir / "gt.bin");
}

auto load_supervised(fs::path const &dir, std::string const &why) -> Dataset
{
  if (!fs::exists(dir / "manifest.json"))
    throw std::runtime_error("no dataset at " + dir.string() + " (manifest.json missing)");
  if (!has_ground_truth(dir))
    throw std::runtime_error(why + " needs ground truth, but " + dir.string() + " has no gt.bin");
  return load_dataset(dir, Access::Supervised);
}

auto log_rows(std::vector<EpochLog> const &log) -> std::vector<std::vector<Real>>
{
  std::vector<std::vector<Real>> rows;
  for (auto const &e : log)
    rows.push_back({Real(e.epoch), e.loss, e.data, e.divergence, e.val_psnr, e.val_ssim});
  return rows;
}

// ---------------------------------------------------------------------------

auto cmd_gen_data(Overrides const &ov, std::string const &config, fs::path const &out) -> int
{
  auto cfg = ov.resolve(config);
  cfg.data.validate();
  auto t0 = std::chrono::steady_clock::now();
  auto ds = gen_dataset(cfg.data, out);
  write_resolved_config(cfg, out);
  Real zf = 0;
  for (Real p : ds.zero_filled_psnr())
    zf += p;
  std::cout << "wrote " << ds.size() << " images (" << ds.ensemble().size() << " masks) to " << out.string()
            << "; mean zero-filled PSNR " << zf / Real(ds.size()) << " dB; "
            << std::chrono::duration<Real>(std::chrono::steady_clock::now() - t0).count() << " s\n";
  return 0;
}

auto cmd_train(Overrides const &ov, std::string const &config, fs::path const &data, fs::path const &out) -> int
{
  auto cfg = ov.resolve(config);
  bool const supervised = cfg.loss.kind == LossKind::Sup;
  if (!fs::exists(data / "manifest.json"))
    throw std::runtime_error("no dataset at " + data.string() + " (manifest.json missing)");
  // the training handle is blinded for every loss but sup
  Dataset train_ds = supervised ? load_supervised(data, "loss 'sup'") : load_dataset(data, Access::Unsupervised);
  std::optional<Dataset> reference;
  if (!supervised && has_ground_truth(data) && train_ds.range(Split::Val).size() > 0)
    reference.emplace(load_dataset(data, Access::Supervised));
  cfg.data = train_ds.config();
  cfg.net.validate();

  auto const obj = objective_for(cfg.loss, train_ds.density(), train_ds.config().sigma);
  auto samples = training_samples(train_ds, obj, cfg.train.seed);
  Validator validate;
  if (supervised)
    validate = make_validator(train_ds);
  else if (reference)
    validate = make_validator(*reference);
  fs::create_directories(out);
  write_resolved_config(cfg, out);

  auto t0 = std::chrono::steady_clock::now();
  std::vector<Real> seconds;
  auto result = train(init_network(cfg.net, std::uint64_t(cfg.net_seed)), samples, obj, cfg.train, validate,
                      [&](EpochLog const &e) {
                        seconds.push_back(e.seconds);
                        std::cout << "epoch " << e.epoch << " loss " << e.loss << " (data " << e.data << ", div "
                                  << e.divergence << ")";
                        if (std::isfinite(e.val_psnr))
                          std::cout << " val PSNR " << e.val_psnr;
                        std::cout << '\n';
                      });
  Real const wall = std::chrono::duration<Real>(std::chrono::steady_clock::now() - t0).count();
  write_series({"epoch", "loss", "data", "divergence", "val_psnr", "val_ssim"}, log_rows(result.log), out / "log.csv");

  nlohmann::ordered_json meta{{"loss", to_string(cfg.loss.kind)},
                              {"variant", to_string(cfg.loss.variant)},
                              {"weighting", to_string(cfg.loss.weighting)},
                              {"net_seed", cfg.net_seed},
                              {"train_seed", cfg.train.seed},
                              {"epochs", cfg.train.epochs},
                              {"data", {{"shape", {cfg.data.shape.rows, cfg.data.shape.cols}},
                                        {"n_coils", cfg.data.n_coils},
                                        {"accel", cfg.data.accel},
                                        {"sigma", cfg.data.sigma},
                                        {"seed", cfg.data.seed}}},
                              {"wall_seconds", wall},
                              {"epoch_seconds", seconds}};
  save_checkpoint(out / "checkpoint.bin", result.net, meta.dump(2));
  std::cout << "checkpoint " << (out / "checkpoint.bin").string() << "; " << wall << " s\n";
  return 0;
}

auto cmd_eval(std::string const &config, fs::path const &data, fs::path const &checkpoint, bool identity,
              std::string method, std::string const &split_name, fs::path const &out) -> int
{
  Split split = Split::Test;
  if (split_name == "train")
    split = Split::Train;
  else if (split_name == "val")
    split = Split::Val;
  else if (split_name != "test")
    throw UsageError("--split: expected train, val or test, got '" + split_name + "'");
  if (identity == !checkpoint.empty())
    throw UsageError("eval: give exactly one of --checkpoint and --identity");

  std::optional<ReconNetwork> net;
  if (!identity) {
    if (!fs::exists(checkpoint))
      throw std::runtime_error("checkpoint " + checkpoint.string() + " does not exist");
    net.emplace(load_checkpoint(checkpoint));
    if (!config.empty() && !(load_config(config).net == net->config()))
      throw std::runtime_error("the network in " + checkpoint.string() + " does not match the config's net section");
    if (method.empty()) {
      method = "network";
      fs::path const side = checkpoint.string() + ".json";
      if (fs::exists(side)) {
        auto const meta = nlohmann::json::parse(std::ifstream(side), nullptr, false);
        if (!meta.is_discarded() && meta.contains("loss"))
          method = meta.at("loss").get<std::string>();
      }
    }
  }
  if (method.empty())
    method = "zero-filled";

  auto ds = load_supervised(data, "evaluation");
  auto result = evaluate(identity ? zero_filled() : network_reconstructor(*net), ds, split, method);
  fs::create_directories(out);
  write_table(result.rows, out / "metrics.csv");
  std::cout << method << " on " << to_string(split) << ": PSNR " << result.summary.psnr_mean << " +- "
            << result.summary.psnr_std << " dB, SSIM " << result.summary.ssim_mean << " +- " << result.summary.ssim_std
            << " (" << result.psnr.size() << " images)\n";
  return 0;
}

auto cmd_verify(std::string const &suite, VerifyOptions const &opt, fs::path const &out) -> int
{
  std::vector<std::string> names;
  if (suite == "all")
    names = verify_suites();
  else
    names = {suite};
  for (auto const &n : names)
    if (std::find(verify_suites().begin(), verify_suites().end(), n) == verify_suites().end())
      throw UsageError("verify: unknown suite '" + n + "'");
  std::vector<SuiteReport> reports;
  for (auto const &n : names) {
    try {
      reports.push_back(run_suite(n, opt));
    } catch (std::invalid_argument const &e) {
      throw UsageError(e.what());
    }
    auto const &r = reports.back();
    for (auto const &c : r.checks)
      std::cout << (c.pass ? "PASS " : "FAIL ") << r.suite << '.' << c.name << "  statistic " << c.statistic
                << "  tolerance " << c.tolerance << (c.detail.empty() ? "" : "  [" + c.detail + "]") << '\n';
    std::cout << r.suite << ": " << (r.pass() ? "pass" : "FAIL") << " (" << r.seconds << " s)\n";
  }
  auto const json = verify_json(reports);
  if (!out.empty()) {
    fs::create_directories(out);
    std::ofstream f(out / "verify.json", std::ios::trunc);
    f << json;
    if (!f)
      throw std::runtime_error("cannot write " + (out / "verify.json").string());
  }
  bool all = true;
  for (auto const &r : reports)
    all = all && r.pass();
  return all ? 0 : 1;
}

} // namespace

auto run_cli(std::vector<std::string> const &args) -> int
{
  CLI::App app{"ensure-lab: self-supervised MRI reconstruction experiments", "ensure-lab"};
  app.require_subcommand(1);

  std::string config, suite = "all", method, split = "test";
  fs::path out, data, checkpoint;
  bool identity = false;
  VerifyOptions vopt;

  Overrides gen_ov, train_ov;
  auto *gen = app.add_subcommand("gen-data", "simulate a phantom dataset");
  gen->add_option("--out", out, "dataset directory")->required();
  gen->add_option("--config", config, "experiment config (JSON)");
  add_data_flags(gen, gen_ov);

  auto *tr = app.add_subcommand("train", "train a reconstruction network");
  tr->add_option("--data", data, "dataset directory")->required();
  tr->add_option("--out", out, "run directory")->required();
  tr->add_option("--config", config, "experiment config (JSON)");
  add_train_flags(tr, train_ov);

  auto *ev = app.add_subcommand("eval", "score reconstructions against ground truth");
  ev->add_option("--data", data, "dataset directory")->required();
  ev->add_option("--out", out, "output directory for metrics.csv")->required();
  ev->add_option("--checkpoint", checkpoint, "trained network");
  ev->add_flag("--identity", identity, "score the zero-filled input instead of a network");
  ev->add_option("--method", method, "method name in the table");
  ev->add_option("--split", split, "train | val | test");
  ev->add_option("--config", config, "config whose net section must match the checkpoint");

  auto *vf = app.add_subcommand("verify", "run numerical verification suites");
  vf->add_option("suite", suite, "adjoint | projection | sure | divergence | lemma1 | lemma2 | gradcheck | weighting | all");
  vf->add_option("--n", vopt.n, "length of the enumerated problems");
  vf->add_option("--seed", vopt.seed, "seed");
  vf->add_option("--draws", vopt.draws, "Monte-Carlo draws");
  vf->add_option("--probes", vopt.probes, "largest divergence probe count");
  vf->add_option("--out", out, "directory for verify.json");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (CLI::CallForHelp const &) {
    std::cout << app.help();
    return 0;
  } catch (CLI::CallForAllHelp const &) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (CLI::ParseError const &e) {
    std::cerr << "ensure-lab: " << e.what() << "\n" << "run 'ensure-lab --help' for usage\n";
    return 2;
  }

  try {
    if (gen->parsed())
      return cmd_gen_data(gen_ov, config, out);
    if (tr->parsed())
      return cmd_train(train_ov, config, data, out);
    if (ev->parsed())
      return cmd_eval(config, data, checkpoint, identity, method, split, out);
    return cmd_verify(suite, vopt, out);
  } catch (UsageError const &e) {
    std::cerr << "ensure-lab: " << e.what() << '\n';
    return 2;
  } catch (TrainingDiverged const &e) {
    std::cerr << "ensure-lab: training diverged: " << e.what() << '\n';
    return 1;
  } catch (std::exception const &e) {
    std::cerr << "ensure-lab: " << e.what() << '\n';
    return 1;
  }
}

auto run_cli(int argc, char const *const *argv) -> int
{
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i)
    args.emplace_back(argv[i]);
  return run_cli(args);
}

} // namespace ensure
