#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string output;  // stdout and stderr
};

Result cli(const std::string& args) {
  const std::string cmd = std::string(ROBPOST_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "robpost_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<double> column(const fs::path& csv, std::size_t index) {
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  std::vector<double> out;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    for (std::size_t k = 0; k <= index; ++k) std::getline(ss, cell, ',');
    out.push_back(std::stod(cell));
  }
  return out;
}

}  // namespace

TEST_CASE("missing column exits 2 and names the column") {
  const auto dir = scratch("missing");
  std::ofstream(dir / "bad.csv") << "unit_id,j\n1,1\n1,2\n";
  const auto r = cli("estimate --model fixed_effects --target cdf:0 --data " + (dir / "bad.csv").string() +
                     " --out " + dir.string());
  CHECK(r.code == 2);
  CHECK(r.output.find("'y'") != std::string::npos);
}

TEST_CASE("repeated seed gives byte-identical files") {
  const auto a = scratch("seed_a"), b = scratch("seed_b");
  for (const auto& dir : {a, b})
    REQUIRE(cli("simulate --dgp fixed_effects --n 300 --seed 11 --out " + dir.string()).code == 0);
  CHECK(slurp(a / "fixed_effects.csv") == slurp(b / "fixed_effects.csv"));
  CHECK(slurp(a / "fixed_effects_latent.csv") == slurp(b / "fixed_effects_latent.csv"));
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
  const auto c = scratch("seed_c");
  REQUIRE(cli("simulate --dgp fixed_effects --n 300 --seed 12 --out " + c.string()).code == 0);
  CHECK(slurp(a / "fixed_effects.csv") != slurp(c / "fixed_effects.csv"));
}

TEST_CASE("seed falls back to the environment") {
  const auto a = scratch("env_a"), b = scratch("env_b");
  REQUIRE(cli("simulate --dgp binary_choice --n 50 --seed 77 --out " + a.string()).code == 0);
  const std::string cmd = "ROBPOST_SEED=77 " + std::string(ROBPOST_CLI) + " simulate --dgp binary_choice --n 50 --out " +
                          b.string() + " > /dev/null";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(slurp(a / "binary_choice.csv") == slurp(b / "binary_choice.csv"));
}

TEST_CASE("lognormal neighborhood simulation writes one row per unit") {
  const auto dir = scratch("neighborhood");
  REQUIRE(cli("simulate --dgp neighborhood --n 50000 --out " + dir.string()).code == 0);
  CHECK(column(dir / "neighborhood.csv", 1).size() == 50000);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["rows"] == 50000);
  CHECK(manifest["config"]["params"]["shape"] == "lognormal");
  CHECK(manifest.contains("code_version"));
}

TEST_CASE("skew-normal simulation has skewness near .47") {
  const auto dir = scratch("skew");
  REQUIRE(cli("simulate --dgp skew_normal --n 200000 --param J=1 --seed 3 --out " + dir.string()).code == 0);
  const auto a = column(dir / "skew_normal_latent.csv", 1);
  double m = 0.0;
  for (double v : a) m += v / a.size();
  double m2 = 0.0, m3 = 0.0;
  for (double v : a) {
    m2 += (v - m) * (v - m) / a.size();
    m3 += (v - m) * (v - m) * (v - m) / a.size();
  }
  CHECK(std::abs(m3 / std::pow(m2, 1.5) - 0.47) < 0.02);
}

TEST_CASE("zero radius gives the Wald interval") {
  const auto dir = scratch("wald");
  REQUIRE(cli("simulate --dgp fixed_effects --n 400 --seed 5 --out " + dir.string()).code == 0);
  const auto r = cli("estimate --model fixed_effects --target cdf:0.3 --epsilon 0 --draws 3000 --data " +
                     (dir / "fixed_effects.csv").string() + " --out " + dir.string());
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "estimate.json"));
  const double est = j["estimates"]["posterior"], var = j["sigma"]["posterior_posterior"];
  const double n = j["n"];
  const double half = 1.959963984540054 * std::sqrt(var / n);
  CHECK(j["intervals"][0]["lower"].get<double>() == doctest::Approx(est - half).epsilon(1e-12));
  CHECK(j["intervals"][0]["upper"].get<double>() == doctest::Approx(est + half).epsilon(1e-12));
}

TEST_CASE("unknown figure and unknown dgp are validation errors") {
  const auto dir = scratch("unknown");
  auto r = cli("reproduce --figure fig99 --out " + dir.string());
  CHECK(r.code == 2);
  CHECK(r.output.find("fig99") != std::string::npos);
  r = cli("simulate --dgp nope --out " + dir.string());
  CHECK(r.code == 2);
  r = cli("estimate --model fixed_effects --target cdf:0 --divergence cressie-read:abc --out " + dir.string());
  CHECK(r.code == 2);
  CHECK(cli("frobnicate").code == 2);
}

TEST_CASE("one measurement per unit needs the noise variance") {
  const auto dir = scratch("single");
  REQUIRE(cli("simulate --dgp fixed_effects --n 200 --param J=1 --out " + dir.string()).code == 0);
  const std::string data = (dir / "fixed_effects.csv").string();
  auto r = cli("estimate --model fixed_effects --target cdf:0 --draws 2000 --data " + data + " --out " + dir.string());
  CHECK(r.code == 2);
  CHECK(r.output.find("var_eps") != std::string::npos);
  r = cli("estimate --model fixed_effects --target cdf:0 --draws 2000 --param var_eps=1 --data " + data + " --out " +
          dir.string());
  CHECK(r.code == 0);
}

TEST_CASE("config file fills options and flags take precedence") {
  const auto dir = scratch("config");
  std::ofstream(dir / "cfg.json") << R"({"dgp": "censored", "n": 120, "seed": 4, "params": {"beta0": 0.2}})";
  REQUIRE(cli("simulate --config " + (dir / "cfg.json").string() + " --n 80 --out " + dir.string()).code == 0);
  CHECK(column(dir / "censored.csv", 0).size() == 80);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["seed"] == 4);
  CHECK(manifest["config"]["params"]["beta0"] == "0.2");
  std::ofstream(dir / "bad.json") << R"({"figure": "fig1"})";
  CHECK(cli("simulate --config " + (dir / "bad.json").string() + " --out " + dir.string()).code == 2);
}

TEST_CASE("every model key estimates from its simulated data") {
  const auto dir = scratch("models");
  struct Case {
    std::string dgp, model, target, extra;
  };
  const std::vector<Case> cases{{"fixed_effects", "fixed_effects", "mean", ""},
                                {"linear_regression", "linear_regression", "error_cdf:0.5", ""},
                                {"binary_choice", "binary_choice", "asf:0.5", ""},
                                {"censored", "censored", "mean", ""},
                                {"perm_transitory", "perm_transitory", "cdf:eps:2:0", ""}};
  for (const auto& c : cases) {
    CAPTURE(c.model);
    REQUIRE(cli("simulate --dgp " + c.dgp + " --n 400 --out " + dir.string()).code == 0);
    const auto r = cli("estimate --format csv --draws 2000 --model " + c.model + " --target " + c.target +
                       " --epsilon 0.01 --data " + (dir / (c.dgp + ".csv")).string() + " --out " + dir.string());
    CHECK(r.code == 0);
    CHECK(r.output.find("ci_upper,0.01,") != std::string::npos);
  }
  REQUIRE(cli("simulate --dgp ordered_choice --n 400 --out " + dir.string()).code == 0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  const std::string thresholds = manifest["config"]["params"]["thresholds"];
  const auto r = cli("estimate --model ordered_choice --target asf:0 --draws 2000 --param thresholds=" + thresholds +
                     " --data " + (dir / "ordered_choice.csv").string() + " --out " + dir.string());
  CHECK(r.code == 0);
}

TEST_CASE("bias and oracle commands write their reports") {
  const auto dir = scratch("bias");
  REQUIRE(cli("simulate --dgp fixed_effects --n 300 --out " + dir.string()).code == 0);
  auto r = cli("bias --model fixed_effects --target cdf:0 --divergence kl --epsilon 0.01 --epsilon 0.1 --draws 2000 "
               "--data " + (dir / "fixed_effects.csv").string() + " --out " + dir.string());
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "bias.json"));
  CHECK(j["divergence"] == "kl");
  r = cli("oracle --format csv --epsilon 0.1 --seed 2 --out " + dir.string());
  REQUIRE(r.code == 0);
  CHECK(r.output.rfind("epsilon,bias_posterior_dual", 0) == 0);
}

TEST_CASE("reproduce writes tables, a summary and the check status") {
  const auto dir = scratch("reproduce");
  const auto r = cli("reproduce --figure binary_ratio --out " + dir.string());
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "binary_ratio.csv"));
  const auto summary = nlohmann::json::parse(slurp(dir / "binary_ratio_summary.json"));
  CHECK(summary["passed"] == true);
  CHECK(r.output.find("PASS binary_ratio.ratio_eta_0.01") != std::string::npos);

  const auto d2 = cli("reproduce --figure figD2 --reps 8 --out " + dir.string());
  const auto s2 = nlohmann::json::parse(slurp(dir / "figD2_summary.json"));
  CHECK(d2.code == (s2["passed"] == true ? 0 : 4));
}
