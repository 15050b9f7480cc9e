#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "robpost/error.hpp"
#include "robpost/experiments/registry.hpp"
#include "robpost/experiments/report.hpp"
#include "robpost/experiments/reproduce.hpp"
#include "robpost/experiments/studies.hpp"
#include "robpost/stats/normal.hpp"

using namespace robpost;
using namespace robpost::exp;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("robpost_exp_" + name);
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("number formatting is fixed and signless at zero") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("tables and figure summaries") {
  Table t{"demo", {"x", "y"}, {}};
  t.add({1.0, 0.5});
  CHECK_THROWS_AS(t.add({1.0}), ValidationError);
  std::ostringstream csv;
  t.write_csv(csv);
  CHECK(csv.str() == "x,y\n1,0.5\n");

  FigureResult f;
  f.id = "demo";
  f.checks.push_back({"inside", 0.5, 0.0, 1.0});
  f.checks.push_back(Check::flag("flag", true));
  f.metrics["missing"] = std::nan("");
  CHECK(f.passed());
  auto j = nlohmann::json::parse(f.summary_json());
  CHECK(j["passed"] == true);
  CHECK(j["metrics"]["missing"].is_null());
  f.checks.push_back(Check::flag("broken", false));
  CHECK_FALSE(f.passed());
  j = nlohmann::json::parse(f.summary_json());
  CHECK(j["checks"][2]["passed"] == false);
}

TEST_CASE("parameter bag records defaults and rejects malformed numbers") {
  ParamMap p{{"a", "2.5"}, {"bad", "2x"}};
  CHECK(param_number(p, "a", 1.0) == 2.5);
  CHECK(param_number(p, "b", 7.0) == 7.0);
  CHECK(p.at("b") == "7");
  CHECK(param_text(p, "shape", "normal") == "normal");
  CHECK(p.at("shape") == "normal");
  CHECK_THROWS_AS(param_number(p, "bad", 0.0), ValidationError);
  CHECK(parse_number_list("1,2;3") == std::vector<double>{1.0, 2.0, 3.0});
  CHECK_THROWS_AS(parse_number_list("1,q"), ValidationError);
}

TEST_CASE("simulated data round-trips through the matching model") {
  const std::vector<std::pair<std::string, std::string>> pairs{{"fixed_effects", "cdf:0"},
                                                               {"linear_regression", "mean_error"},
                                                               {"binary_choice", "asf:0"},
                                                               {"censored", "mean"},
                                                               {"perm_transitory", "cdf:eta:1:0"}};
  for (const auto& [key, target] : pairs) {
    CAPTURE(key);
    ParamMap sp;
    const SimulatedData a = simulate_dgp(key, sp, 300, 5);
    ParamMap sp2;
    CHECK(simulate_dgp(key, sp2, 300, 5).csv == a.csv);
    CHECK(sp == sp2);
    const auto path = write_temp(key + ".csv", a.csv);
    ParamMap mp;
    const PreparedModel pm = prepare_model(key, path, target, mp);
    CHECK(pm.data.size() == 300);
    CHECK(pm.model->key() == key);
  }
}

TEST_CASE("ordered choice simulation records its thresholds") {
  ParamMap p{{"categories", "4"}};
  const SimulatedData d = simulate_dgp("ordered_choice", p, 500, 2);
  const auto mu = parse_number_list(p.at("thresholds"));
  REQUIRE(mu.size() == 3);
  CHECK(std::is_sorted(mu.begin(), mu.end()));
  ParamMap given{{"categories", "3"}, {"thresholds", "-0.5,0.5"}};
  simulate_dgp("ordered_choice", given, 10, 2);
  CHECK(given.at("thresholds") == "-0.5,0.5");
  ParamMap wrong{{"categories", "5"}, {"thresholds", "-0.5,0.5"}};
  CHECK_THROWS_AS(simulate_dgp("ordered_choice", wrong, 10, 2), ValidationError);
}

TEST_CASE("target syntax errors are validation errors") {
  ParamMap sp;
  const auto path = write_temp("fe_targets.csv", simulate_dgp("fixed_effects", sp, 50, 1).csv);
  ParamMap p;
  CHECK_THROWS_AS(prepare_model("fixed_effects", path, "cdf", p), ValidationError);
  CHECK_THROWS_AS(prepare_model("fixed_effects", path, "quantile:0.5", p), ValidationError);
  CHECK_THROWS_AS(prepare_model("no_such_model", path, "mean", p), ValidationError);
  CHECK_THROWS_AS(prepare_model("fixed_effects", "/nonexistent/file.csv", "mean", p), ValidationError);
}

TEST_CASE("estimate report: Wald limit and widening intervals") {
  ParamMap sp;
  const auto path = write_temp("fe_est.csv", simulate_dgp("fixed_effects", sp, 400, 9).csv);
  EstimateRequest r;
  r.model = "fixed_effects";
  r.data_path = path;
  r.target = "cdf:0.2";
  r.epsilons = {0.0, 0.01, 0.1};
  r.draws = 3000;
  const EstimateReport rep = run_estimate(r);
  const double half = stats::normal_quantile(0.975) * std::sqrt(rep.sigma_pp / static_cast<double>(rep.n));
  CHECK(rep.intervals[0].lower == doctest::Approx(rep.posterior - half).epsilon(1e-12));
  CHECK(rep.intervals[0].upper == doctest::Approx(rep.posterior + half).epsilon(1e-12));
  CHECK(rep.intervals[1].half_width > rep.intervals[0].half_width);
  CHECK(rep.intervals[2].half_width > rep.intervals[1].half_width);
  CHECK(rep.r2 > 0.0);
  CHECK(rep.r2 < 1.0);
  CHECK(rep.spec_p_value >= 0.0);
  CHECK(rep.spec_p_value <= 1.0);
  const auto j = nlohmann::json::parse(rep.to_json());
  CHECK(j["intervals"].size() == 3);
  CHECK(rep.to_csv().rfind("quantity,epsilon,value\n", 0) == 0);
}

TEST_CASE("gini of the log-normal limit matches its closed form") {
  // Gini of exp(alpha), alpha standard normal: 2 Phi(1 / sqrt 2) - 1.
  CHECK(skew_normal_gini(0.0) == doctest::Approx(2.0 * stats::normal_cdf(1.0 / std::sqrt(2.0)) - 1.0).epsilon(1e-8));
}

TEST_CASE("informativeness falls as noise rises") {
  const R2Calibration low = neighborhood_r2(0.03, 0.005, 20000, 3, 41);
  const R2Calibration high = neighborhood_r2(0.03, 0.05, 20000, 3, 41);
  CHECK(low.weighted_mean > high.weighted_mean);
  double total = 0.0;
  for (double w : low.weight) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("studies do not depend on the thread count") {
  const DivergenceSpec chi2;
  const TheoremSweep one = theorem_sweep(3, {0.1}, chi2, 4, 1);
  const TheoremSweep two = theorem_sweep(3, {0.1}, chi2, 4, 2);
  REQUIRE(one.rows.size() == two.rows.size());
  for (std::size_t k = 0; k < one.rows.size(); ++k) CHECK(one.rows[k].bias_ratio == two.rows[k].bias_ratio);
  const OrderedAsfStudy a = ordered_asf_study(4, 300, 3, 8, 1, 5);
  const OrderedAsfStudy b = ordered_asf_study(4, 300, 3, 8, 3, 5);
  CHECK(a.mad_posterior == b.mad_posterior);
  CHECK(a.mad_model == b.mad_model);
}

TEST_CASE("posterior means of the income components add up to the outcome") {
  CHECK(income_additive_gap(300, 6) <= 1e-10);
}

TEST_CASE("reproduce registry") {
  CHECK(figure_ids().size() == 7);
  CHECK_THROWS_AS(reproduce("fig99", {}), ValidationError);
  const FigureResult r = reproduce("binary_ratio", {});
  CHECK(r.passed());
  CHECK(r.tables.size() == 1);
}
