// robpost: command-line front end for simulation, estimation, robustness
// reports, finite-support oracles and figure reproduction.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "robpost/error.hpp"
#include "robpost/experiments/registry.hpp"
#include "robpost/experiments/reproduce.hpp"
#include "robpost/stats/rng.hpp"

#ifndef ROBPOST_VERSION
#define ROBPOST_VERSION "unknown"
#endif

namespace {

using robpost::exp::ParamMap;
using Json = nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 20240607;

enum Exit { ok = 0, validation = 2, numerical = 3, check_failed = 4 };

struct Config {
  std::string command;
  std::string data, model, target, dgp, figure, divergence = "chi2", format = "json", out = ".", config;
  std::vector<double> epsilons;
  std::vector<std::string> params;
  std::size_t draws = 0, n = 1000;
  int reps = 0;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  double trim_top = 0.01;
  bool precision_weights = false;
  bool seed_given = false;
  ParamMap param_map;
};

std::string divergence_text(std::string s) {
  if (s.rfind("cressie-read", 0) == 0) s.replace(0, 12, "cressie_read");
  return s;
}

ParamMap parse_params(const std::vector<std::string>& items) {
  ParamMap out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw robpost::ValidationError("--param expects key=value, got '" + item + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return robpost::exp::format_number(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  throw robpost::ValidationError("config: parameter values must be scalars");
}

// Values from the JSON config file fill every option not given on the command line.
void apply_config_file(Config& c, const CLI::App& sub) {
  std::ifstream in(c.config);
  if (!in) throw robpost::ValidationError("cannot open config '" + c.config + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw robpost::ValidationError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw robpost::ValidationError("config: expected a JSON object");
  auto unset = [&](const std::string& flag) {
    const auto* opt = sub.get_option_no_throw("--" + flag);
    return opt != nullptr && opt->count() == 0;
  };
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "params") {
        if (!v.is_object()) throw robpost::ValidationError("config: 'params' must be an object");
        for (const auto& [pk, pv] : v.items()) c.param_map.emplace(pk, scalar_text(pv));
        continue;
      }
      if (!unset(key)) {
        if (sub.get_option_no_throw("--" + key) == nullptr)
          throw robpost::ValidationError("config: unknown key '" + key + "' for '" + c.command + "'");
        continue;
      }
      if (key == "data") c.data = v.get<std::string>();
      else if (key == "model") c.model = v.get<std::string>();
      else if (key == "target") c.target = v.get<std::string>();
      else if (key == "dgp") c.dgp = v.get<std::string>();
      else if (key == "figure") c.figure = v.get<std::string>();
      else if (key == "divergence") c.divergence = v.get<std::string>();
      else if (key == "format") c.format = v.get<std::string>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "epsilon") c.epsilons = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
      else if (key == "draws") c.draws = v.get<std::size_t>();
      else if (key == "n") c.n = v.get<std::size_t>();
      else if (key == "reps") c.reps = v.get<int>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>(), c.seed_given = true;
      else if (key == "trim-top") c.trim_top = v.get<double>();
      else if (key == "precision-weights") c.precision_weights = v.get<bool>();
      else throw robpost::ValidationError("config: unsupported key '" + key + "'");
    } catch (const Json::exception& e) {
      throw robpost::ValidationError("config: bad value for '" + key + "': " + e.what());
    }
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw robpost::ValidationError("cannot write '" + path.string() + "'");
  out << text;
}

void write_manifest(const Config& c, const std::vector<std::string>& outputs, Json extra = Json::object()) {
  Json m;
  m["command"] = c.command;
  m["code_version"] = ROBPOST_VERSION;
  m["seed"] = c.seed;
  Json cfg;
  auto put = [&](const char* k, const std::string& v) {
    if (!v.empty()) cfg[k] = v;
  };
  put("data", c.data);
  put("model", c.model);
  put("target", c.target);
  put("dgp", c.dgp);
  put("figure", c.figure);
  cfg["divergence"] = c.divergence;
  cfg["format"] = c.format;
  cfg["epsilon"] = c.epsilons;
  cfg["draws"] = c.draws;
  cfg["n"] = c.n;
  cfg["reps"] = c.reps;
  cfg["threads"] = c.threads;
  cfg["seed"] = c.seed;
  if (c.command == "reproduce") {
    cfg["trim-top"] = c.trim_top;
    cfg["precision-weights"] = c.precision_weights;
  }
  cfg["params"] = c.param_map;
  m["config"] = cfg;
  m["outputs"] = outputs;
  for (auto& [k, v] : extra.items()) m[k] = v;
  write_file(std::filesystem::path(c.out) / "manifest.json", m.dump(2) + "\n");
}

robpost::exp::EstimateRequest make_request(const Config& c) {
  if (c.model.empty()) throw robpost::ValidationError("--model is required");
  if (c.target.empty()) throw robpost::ValidationError("--target is required");
  robpost::exp::EstimateRequest r;
  r.model = c.model;
  r.data_path = c.data;
  r.target = c.target;
  if (!c.epsilons.empty()) r.epsilons = c.epsilons;
  r.divergence = robpost::DivergenceSpec::parse(divergence_text(c.divergence));
  if (c.draws > 0) r.draws = c.draws;
  r.seed = c.seed;
  r.params = c.param_map;
  return r;
}

int cmd_simulate(Config& c) {
  if (c.dgp.empty()) throw robpost::ValidationError("--dgp is required");
  const auto sim = robpost::exp::simulate_dgp(c.dgp, c.param_map, c.n, c.seed);
  std::vector<std::string> outputs{c.dgp + ".csv"};
  write_file(std::filesystem::path(c.out) / outputs[0], sim.csv);
  if (!sim.latent_csv.empty()) {
    outputs.push_back(c.dgp + "_latent.csv");
    write_file(std::filesystem::path(c.out) / outputs[1], sim.latent_csv);
  }
  write_manifest(c, outputs, {{"rows", sim.rows}});
  std::cout << "wrote " << sim.rows << " rows to " << (std::filesystem::path(c.out) / outputs[0]).string() << '\n';
  return ok;
}

int cmd_estimate(Config& c) {
  auto req = make_request(c);
  const auto rep = robpost::exp::run_estimate(req);
  c.param_map = req.params;
  if (c.epsilons.empty()) c.epsilons = req.epsilons;
  const std::string file = "estimate." + c.format;
  const std::string text = c.format == "json" ? rep.to_json() : rep.to_csv();
  write_file(std::filesystem::path(c.out) / file, text);
  write_manifest(c, {file});
  std::cout << text;
  return ok;
}

int cmd_bias(Config& c) {
  auto req = make_request(c);
  if (c.epsilons.empty()) req.epsilons = {0.0, 0.01, 0.1};
  const std::string text = robpost::exp::run_bias(req, c.format == "json");
  c.param_map = req.params;
  c.epsilons = req.epsilons;
  const std::string file = "bias." + c.format;
  write_file(std::filesystem::path(c.out) / file, text);
  write_manifest(c, {file});
  std::cout << text;
  return ok;
}

int cmd_oracle(Config& c) {
  if (c.epsilons.empty()) c.epsilons = {0.01, 0.1, 1.0};
  const auto div = robpost::DivergenceSpec::parse(divergence_text(c.divergence));
  const std::string text = robpost::exp::run_oracle(c.data, c.epsilons, div, c.seed, c.format == "json");
  const std::string file = "oracle." + c.format;
  write_file(std::filesystem::path(c.out) / file, text);
  write_manifest(c, {file});
  std::cout << text;
  return ok;
}

int cmd_reproduce(Config& c) {
  if (c.figure.empty()) throw robpost::ValidationError("--figure is required");
  const auto& known = robpost::exp::figure_ids();
  const std::vector<std::string> ids = c.figure == "all" ? known : std::vector<std::string>{c.figure};
  for (const auto& id : ids)
    if (std::find(known.begin(), known.end(), id) == known.end())
      throw robpost::ValidationError("unknown figure id '" + id + "'");
  robpost::exp::ReproduceOptions o;
  o.seed = c.seed;
  o.threads = c.threads;
  o.data_path = c.data;
  o.draws = c.draws;
  o.reps = c.reps;
  o.divergence = robpost::DivergenceSpec::parse(divergence_text(c.divergence));
  o.neighborhood.trim_top = c.trim_top;
  o.neighborhood.precision_weights = c.precision_weights;

  std::vector<std::string> outputs;
  bool all_passed = true;
  for (const auto& id : ids) {
    const auto res = robpost::exp::reproduce(id, o);
    for (const auto& t : res.tables) {
      std::ostringstream csv;
      t.write_csv(csv);
      outputs.push_back(t.name + ".csv");
      write_file(std::filesystem::path(c.out) / outputs.back(), csv.str());
    }
    outputs.push_back(id + "_summary.json");
    write_file(std::filesystem::path(c.out) / outputs.back(), res.summary_json());
    for (const auto& chk : res.checks)
      std::cout << (chk.passed() ? "PASS " : "FAIL ") << id << '.' << chk.name << " = "
                << robpost::exp::format_number(chk.value) << " in [" << robpost::exp::format_number(chk.lower) << ", "
                << robpost::exp::format_number(chk.upper) << "]\n";
    all_passed = all_passed && res.passed();
  }
  write_manifest(c, outputs, {{"checks_passed", all_passed}});
  return all_passed ? ok : check_failed;
}

void add_common(CLI::App* sub, Config& c) {
  sub->add_option("--seed", c.seed, "Random seed (falls back to ROBPOST_SEED, then 20240607)");
  sub->add_option("--threads", c.threads, "Worker threads for replications")->check(CLI::PositiveNumber);
  sub->add_option("--out", c.out, "Output directory")->capture_default_str();
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sub->add_option("--param", c.params, "Model or DGP parameter key=value (repeatable)");
  sub->add_option("--config", c.config, "JSON file with option values; command-line flags take precedence");
}

void add_robustness(CLI::App* sub, Config& c) {
  sub->add_option("--epsilon", c.epsilons, "Neighborhood radius (repeatable)")->allow_extra_args(false);
  sub->add_option("--divergence", c.divergence, "chi2, kl, hellinger or cressie-read:<p>")->capture_default_str();
  sub->add_option("--draws", c.draws, "Reference simulation draws");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Posterior average effect estimators and their robustness to latent misspecification", "robpost"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ROBPOST_VERSION);
  Config c;

  auto* simulate = app.add_subcommand("simulate", "Simulate a data set from a registered DGP");
  add_common(simulate, c);
  simulate->add_option("--dgp", c.dgp, "neighborhood, fixed_effects, skew_normal, binary_choice, ordered_choice, censored, "
                                       "perm_transitory, linear_regression");
  simulate->add_option("--n", c.n, "Number of units")->capture_default_str();

  auto* estimate = app.add_subcommand("estimate", "Model-based and posterior estimates with robustness diagnostics");
  add_common(estimate, c);
  add_robustness(estimate, c);
  estimate->add_option("--data", c.data, "Input CSV");
  estimate->add_option("--model", c.model, "fixed_effects, censored, binary_choice, ordered_choice, perm_transitory, "
                                           "linear_regression");
  estimate->add_option("--target", c.target, "Target specification, e.g. cdf:0.5");

  auto* bias = app.add_subcommand("bias", "Local worst-case bias of the posterior and model-based estimators");
  add_common(bias, c);
  add_robustness(bias, c);
  bias->add_option("--data", c.data, "Input CSV");
  bias->add_option("--model", c.model, "Model registry key");
  bias->add_option("--target", c.target, "Target specification");

  auto* oracle = app.add_subcommand("oracle", "Exact finite-support worst-case analysis");
  add_common(oracle, c);
  add_robustness(oracle, c);
  oracle->add_option("--data", c.data, "Instance JSON (random instance from the seed when omitted)");

  auto* reproduce = app.add_subcommand("reproduce", "Reproduce a figure or numerical study");
  add_common(reproduce, c);
  add_robustness(reproduce, c);
  reproduce->add_option("--figure", c.figure, "fig1, fig2, fig3, figD1, figD2, binary_ratio, theorem_sweep or all");
  reproduce->add_option("--data", c.data, "Optional real-data CSV (summary for fig1, panel for fig3)");
  reproduce->add_option("--reps", c.reps, "Monte Carlo replications (0 keeps the figure default)");
  reproduce->add_option("--trim-top", c.trim_top, "Upper quantile of noise variances dropped in fig1")->capture_default_str();
  reproduce->add_flag("--precision-weights", c.precision_weights, "Weight fig1 units by noise precision");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : validation;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    c.command = sub->get_name();
    c.param_map = parse_params(c.params);
    if (!c.config.empty()) apply_config_file(c, *sub);
    if (sub->get_option("--seed")->count() > 0) c.seed_given = true;
    if (!c.seed_given) c.seed = robpost::stats::seed_from_env(kDefaultSeed);
    std::filesystem::create_directories(c.out);
    if (c.command == "simulate") return cmd_simulate(c);
    if (c.command == "estimate") return cmd_estimate(c);
    if (c.command == "bias") return cmd_bias(c);
    if (c.command == "oracle") return cmd_oracle(c);
    return cmd_reproduce(c);
  } catch (const robpost::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return validation;
  } catch (const robpost::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return numerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return validation;
  }
}
