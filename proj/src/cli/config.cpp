#include "ensure/cli/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace ensure {

namespace {

using json = nlohmann::ordered_json;

void check_keys(json const &j, std::string const &where, std::set<std::string> const &allowed)
{
  if (!j.is_object())
    throw UsageError("config: '" + where + "' must be an object");
  for (auto const &[k, v] : j.items())
    if (!allowed.count(k))
      throw UsageError("config: unknown key '" + (where.empty() ? k : where + "." + k) + "'");
}

template <class T>
void get(json const &j, char const *key, T &out, std::string const &where)
{
  if (!j.contains(key))
    return;
  try {
    out = j.at(key).get<T>();
  } catch (json::exception const &) {
    throw UsageError("config: '" + where + "." + key + "' has the wrong type");
  }
}

template <class Parse>
void get_enum(json const &j, char const *key, Parse parse, std::string const &where)
{
  if (!j.contains(key))
    return;
  if (!j.at(key).is_string())
    throw UsageError("config: '" + where + "." + key + "' must be a string");
  try {
    parse(j.at(key).get<std::string>());
  } catch (std::invalid_argument const &e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

void read_data(json const &j, DatasetConfig &d)
{
  check_keys(j, "data",
             {"n_train", "n_val", "n_test", "shape", "n_coils", "density", "accel", "sigma", "mask_mode", "seed",
              "ground_truth"});
  get(j, "n_train", d.n_train, "data");
  get(j, "n_val", d.n_val, "data");
  get(j, "n_test", d.n_test, "data");
  if (j.contains("shape")) {
    auto const &s = j.at("shape");
    if (s.is_number_integer())
      d.shape = {s.get<Index>(), s.get<Index>()};
    else if (s.is_array() && s.size() == 2)
      d.shape = {s.at(0).get<Index>(), s.at(1).get<Index>()};
    else
      throw UsageError("config: 'data.shape' must be an integer or [rows, cols]");
  }
  get(j, "n_coils", d.n_coils, "data");
  get_enum(j, "density", [&](std::string const &s) { d.density = parse_density_kind(s); }, "data");
  get(j, "accel", d.accel, "data");
  get(j, "sigma", d.sigma, "data");
  get_enum(j, "mask_mode", [&](std::string const &s) {
    if (s != "ensemble" && s != "single")
      throw std::invalid_argument("mask_mode must be 'ensemble' or 'single'");
    d.single_mask = s == "single";
  }, "data");
  get(j, "seed", d.seed, "data");
  get(j, "ground_truth", d.write_ground_truth, "data");
}

void read_net(json const &j, NetConfig &n)
{
  check_keys(j, "net", {"n_layers", "features", "n_unrolls", "dc_lambda", "dc_iters", "dc_adaptive", "dc_tol"});
  get(j, "n_layers", n.n_layers, "net");
  get(j, "features", n.features, "net");
  get(j, "n_unrolls", n.n_unrolls, "net");
  get(j, "dc_lambda", n.dc_lambda, "net");
  get(j, "dc_iters", n.dc_iters, "net");
  get(j, "dc_adaptive", n.dc_adaptive, "net");
  get(j, "dc_tol", n.dc_tol, "net");
}

void read_loss(json const &j, LossConfig &l)
{
  check_keys(j, "loss", {"kind", "variant", "weighting", "n_probes", "epsilon", "probe", "ssdu_ratio"});
  get_enum(j, "kind", [&](std::string const &s) { l.kind = parse_loss_kind(s); }, "loss");
  get_enum(j, "variant", [&](std::string const &s) { l.variant = parse_ensure_variant(s); }, "loss");
  get_enum(j, "weighting", [&](std::string const &s) { l.weighting = parse_weighting_mode(s); }, "loss");
  get(j, "n_probes", l.n_probes, "loss");
  get(j, "epsilon", l.epsilon, "loss");
  get_enum(j, "probe", [&](std::string const &s) { l.probe = parse_probe_kind(s); }, "loss");
  get(j, "ssdu_ratio", l.ssdu_ratio, "loss");
}

void read_train(json const &j, TrainConfig &t, int &net_seed)
{
  check_keys(j, "train", {"epochs", "lr", "batch", "seed", "net_seed", "beta1", "beta2", "adam_eps"});
  get(j, "epochs", t.epochs, "train");
  get(j, "lr", t.lr, "train");
  get(j, "batch", t.batch, "train");
  get(j, "seed", t.seed, "train");
  get(j, "net_seed", net_seed, "train");
  get(j, "beta1", t.beta1, "train");
  get(j, "beta2", t.beta2, "train");
  get(j, "adam_eps", t.adam_eps, "train");
}

} // namespace

auto parse_config(std::string const &text) -> ExperimentConfig
{
  json j;
  try {
    j = json::parse(text);
  } catch (json::exception const &e) {
    throw UsageError(std::string("config: not valid JSON: ") + e.what());
  }
  check_keys(j, "", {"version", "data", "net", "loss", "train"});
  if (!j.contains("version") || !j.at("version").is_number_integer())
    throw UsageError("config: missing integer 'version'");
  if (int v = j.at("version").get<int>(); v != kConfigVersion)
    throw UsageError("config: unsupported version " + std::to_string(v));
  ExperimentConfig c;
  if (j.contains("data"))
    read_data(j.at("data"), c.data);
  if (j.contains("net"))
    read_net(j.at("net"), c.net);
  if (j.contains("loss"))
    read_loss(j.at("loss"), c.loss);
  if (j.contains("train"))
    read_train(j.at("train"), c.train, c.net_seed);
  return c;
}

auto load_config(std::filesystem::path const &path) -> ExperimentConfig
{
  std::ifstream in(path);
  if (!in)
    throw UsageError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

auto config_to_json(ExperimentConfig const &c) -> std::string
{
  json j;
  j["version"] = kConfigVersion;
  auto const &d = c.data;
  j["data"] = {{"n_train", d.n_train},
               {"n_val", d.n_val},
               {"n_test", d.n_test},
               {"shape", {d.shape.rows, d.shape.cols}},
               {"n_coils", d.n_coils},
               {"density", to_string(d.density)},
               {"accel", d.accel},
               {"sigma", d.sigma},
               {"mask_mode", d.single_mask ? "single" : "ensemble"},
               {"seed", d.seed},
               {"ground_truth", d.write_ground_truth}};
  auto const &n = c.net;
  j["net"] = {{"n_layers", n.n_layers},   {"features", n.features}, {"n_unrolls", n.n_unrolls},
              {"dc_lambda", n.dc_lambda}, {"dc_iters", n.dc_iters}, {"dc_adaptive", n.dc_adaptive},
              {"dc_tol", n.dc_tol}};
  auto const &l = c.loss;
  j["loss"] = {{"kind", to_string(l.kind)},
               {"variant", to_string(l.variant)},
               {"weighting", to_string(l.weighting)},
               {"n_probes", l.n_probes},
               {"epsilon", l.epsilon},
               {"probe", to_string(l.probe)},
               {"ssdu_ratio", l.ssdu_ratio}};
  auto const &t = c.train;
  j["train"] = {{"epochs", t.epochs}, {"lr", t.lr},       {"batch", t.batch},       {"seed", t.seed},
                {"net_seed", c.net_seed}, {"beta1", t.beta1}, {"beta2", t.beta2}, {"adam_eps", t.adam_eps}};
  return j.dump(2);
}

void write_resolved_config(ExperimentConfig const &cfg, std::filesystem::path const &dir)
{
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "config.resolved.json", std::ios::trunc);
  out << config_to_json(cfg) << '\n';
  if (!out)
    throw std::runtime_error("cannot write " + (dir / "config.resolved.json").string());
}

auto objective_for(LossConfig const &loss, DensityMap const &density, Real sigma) -> ObjectiveConfig
{
  ObjectiveConfig o;
  o.kind = loss.kind;
  o.variant = loss.variant;
  o.weighting = loss.weighting;
  o.density = density;
  o.noise.sigma = sigma;
  o.div = DivergenceConfig{loss.epsilon, loss.n_probes, loss.probe};
  o.ssdu_ratio = loss.ssdu_ratio;
  validate(o.div);
  return o;
}

} // namespace ensure
