#include "robpost/experiments/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "robpost/data/panel.hpp"
#include "robpost/error.hpp"
#include "robpost/experiments/studies.hpp"
#include "robpost/fixed_effects/params.hpp"
#include "robpost/income/permanent_transitory.hpp"

namespace robpost::exp {

namespace {

std::size_t draws_or(const ReproduceOptions& o, std::size_t fallback) { return o.draws > 0 ? o.draws : fallback; }
int reps_or(const ReproduceOptions& o, int fallback) { return o.reps > 0 ? o.reps : fallback; }

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return in;
}

std::vector<double> tau_grid(double lo, double hi, double step) {
  std::vector<double> out;
  for (double t = lo; t <= hi + 1e-12; t += step) out.push_back(std::round(t * 1e6) / 1e6);
  return out;
}

// ------------------------------------------------------------------- fig1

FigureResult run_fig1(const ReproduceOptions& o) {
  FigureResult res;
  res.id = "fig1";
  const bool synthetic = o.data_path.empty();
  SummaryEffects summary;
  if (synthetic) {
    summary = synthetic_neighborhoods(o.seed);
  } else {
    auto in = open(o.data_path);
    summary = read_summary_csv(in);
  }
  const NeighborhoodFigure fig = neighborhood_figure(summary, o.neighborhood);
  Table dens{"fig1_density", {"grid", "effect_density", "normal_fit", "posterior", "prior"}, {}};
  for (std::size_t g = 0; g < fig.grid.size(); ++g)
    dens.add({fig.grid[g], fig.effect_density[g], fig.normal_fit[g], fig.posterior[g], fig.prior[g]});
  res.tables.push_back(std::move(dens));
  res.metrics["var_total"] = fig.var_total;
  res.metrics["mean_noise"] = fig.mean_noise;
  res.metrics["var_signal"] = fig.var_signal;
  res.metrics["shrinkage"] = fig.shrinkage;
  res.metrics["var_posterior_means"] = fig.var_posterior_means;
  res.metrics["trimmed_units"] = static_cast<double>(fig.trimmed);

  // Informativeness at the published variance split, or at the fitted split
  // when real data are supplied; noise scenarios 100%, 33% and 10%.
  const auto split = synthetic ? fe::decompose_variance(kNeighborhoodVarTotal, kNeighborhoodMeanNoise)
                               : fe::decompose_variance(fig.var_total, fig.mean_noise);
  const std::size_t S = draws_or(o, 50000);
  const std::vector<double> fractions{1.0, 1.0 / 3.0, 0.1};
  std::vector<R2Calibration> cal;
  for (std::size_t k = 0; k < fractions.size(); ++k)
    cal.push_back(neighborhood_r2(split.var_signal, fractions[k] * split.mean_noise, S, o.seed + 17 * (k + 1)));
  Table r2{"fig1_r2", {"a", "weight", "r2", "r2_se", "r2_noise_third", "r2_noise_tenth"}, {}};
  for (std::size_t i = 0; i < cal[0].a.size(); ++i)
    r2.add({cal[0].a[i], cal[0].weight[i], cal[0].r2[i], cal[0].r2_se[i], cal[1].r2[i], cal[2].r2[i]});
  res.tables.push_back(std::move(r2));
  res.metrics["r2_weighted_mean"] = cal[0].weighted_mean;
  res.metrics["r2_weighted_p95"] = cal[0].weighted_p95;
  res.metrics["r2_noise_third_mean"] = cal[1].weighted_mean;
  res.metrics["r2_noise_tenth_mean"] = cal[2].weighted_mean;
  if (synthetic) {
    const double rho = split.shrinkage;
    res.metrics["calibration_shrinkage"] = rho;
    res.checks.push_back({"calibration_var_posterior_means", rho * rho * split.var_total, 0.010, 0.012});
    res.checks.push_back({"r2_weighted_mean", cal[0].weighted_mean, 0.004, 0.008});
    res.checks.push_back({"r2_weighted_p95", cal[0].weighted_p95, 0.009, 0.015});
    res.checks.push_back({"r2_noise_tenth_mean", cal[2].weighted_mean, 0.19, 0.25});
  }
  return res;
}

// ------------------------------------------------------------------- fig2

FigureResult run_fig2(const ReproduceOptions& o) {
  FigureResult res;
  res.id = "fig2";
  const auto split = fe::decompose_variance(kNeighborhoodVarTotal, kNeighborhoodMeanNoise);
  const std::vector<double> fractions{1.0, 1.0 / 3.0, 0.1};
  const DensityStudy st =
      neighborhood_density_study(50000, split.var_signal, split.mean_noise, 1.0, fractions, o.seed);
  Table t{"fig2_density",
          {"grid", "truth", "posterior_100", "prior_100", "posterior_33", "prior_33", "posterior_10", "prior_10"},
          {}};
  for (std::size_t g = 0; g < st.grid.size(); ++g) {
    std::vector<double> row{st.grid[g], st.truth[g]};
    for (const auto& sc : st.scenarios) {
      row.push_back(sc.posterior[g]);
      row.push_back(sc.prior[g]);
    }
    t.add(std::move(row));
  }
  res.tables.push_back(std::move(t));
  const char* labels[] = {"100", "33", "10"};
  const double published[] = {0.38, 0.65, 0.86};
  for (std::size_t k = 0; k < st.scenarios.size(); ++k) {
    const auto& sc = st.scenarios[k];
    const std::string l = labels[k];
    res.metrics["estimated_shrinkage_" + l] = sc.estimated_shrinkage;
    res.metrics["sup_distance_" + l] = sc.sup_distance;
    res.checks.push_back({"shrinkage_" + l, sc.design_shrinkage, published[k] - 0.01, published[k] + 0.01});
  }
  const bool decreasing = st.scenarios[0].sup_distance > st.scenarios[1].sup_distance &&
                          st.scenarios[1].sup_distance > st.scenarios[2].sup_distance;
  res.checks.push_back(Check::flag("sup_distance_strictly_decreasing", decreasing));
  return res;
}

// ------------------------------------------------------------------- fig3

FigureResult run_fig3(const ReproduceOptions& o) {
  FigureResult res;
  res.id = "fig3";
  PanelData panel;
  if (o.data_path.empty()) {
    income::PtSimulationConfig cfg;
    cfg.params = income::psid_like_params();
    cfg.scale_mixture = true;
    stats::RngStream rng(o.seed);
    panel = income::simulate_pt(cfg, 792, rng);
  } else {
    auto in = open(o.data_path);
    panel = read_panel_csv(in, "t");
  }
  const auto tau = tau_grid(0.05, 0.95, 0.05);
  const IncomeCurves c = income_curves(panel, tau, draws_or(o, 20000), o.seed + 1);
  Table t{"fig3_quantiles", {"tau", "eta_difference", "eps_difference", "r2_eta", "r2_eps", "r2_eta_se", "r2_eps_se"}, {}};
  for (std::size_t k = 0; k < tau.size(); ++k)
    t.add({tau[k], c.eta.difference[k], c.eps.difference[k], c.r2_eta.r2[k], c.r2_eps.r2[k], c.r2_eta.r2_se[k],
           c.r2_eps.r2_se[k]});
  res.tables.push_back(std::move(t));
  res.metrics["var_eta1"] = c.params.var_eta1;
  res.metrics["r2_eta_max"] = *std::max_element(c.r2_eta.r2.begin(), c.r2_eta.r2.end());
  res.metrics["r2_eps_max"] = *std::max_element(c.r2_eps.r2.begin(), c.r2_eps.r2.end());

  // Synthetic signatures.
  const auto null_tau = tau_grid(0.1, 0.9, 0.1);
  const IncomeNull null = income_gaussian_null(100000, null_tau, o.seed + 2);
  res.checks.push_back({"gaussian_null_max_abs_eta", null.max_abs_eta, 0.0, 0.01});
  res.checks.push_back({"gaussian_null_max_abs_eps", null.max_abs_eps, 0.0, 0.01});
  const IncomeSignature sig = income_peakedness(20000, o.seed + 3);
  res.metrics["peakedness_eta_low"] = sig.eta_low;
  res.metrics["peakedness_eta_high"] = sig.eta_high;
  res.metrics["peakedness_eps_low"] = sig.eps_low;
  res.metrics["peakedness_eps_high"] = sig.eps_high;
  res.checks.push_back(Check::flag("peakedness_sign_pattern",
                                   sig.eta_low > 0 && sig.eta_high < 0 && sig.eps_low > 0 && sig.eps_high < 0));
  res.checks.push_back({"additive_identity_gap", income_additive_gap(1000, o.seed + 4), 0.0, 1e-10});
  return res;
}

// ------------------------------------------------------------------ figD1

FigureResult run_figD1(const ReproduceOptions& o) {
  FigureResult res;
  res.id = "figD1";
  std::vector<int> J;
  for (int j = 1; j <= 30; ++j) J.push_back(j);
  const SkewGiniStudy st = skewness_gini_study(J, 1000, reps_or(o, 100), 0.47, o.seed, o.threads);
  Table t{"figD1",
          {"J", "skewness_true", "skewness_posterior", "skewness_posterior_sd", "skewness_model", "gini_true",
           "gini_posterior", "gini_posterior_sd", "gini_model"},
          {}};
  std::map<int, const SkewGiniPoint*> at;
  double max_model = 0.0;
  for (const auto& p : st.points) {
    t.add({static_cast<double>(p.J), st.true_skewness, p.skew_posterior, p.skew_posterior_sd, p.skew_model,
           st.true_gini, p.gini_posterior, p.gini_posterior_sd, p.gini_model});
    at[p.J] = &p;
    max_model = std::max(max_model, p.max_abs_skew_model);
  }
  res.tables.push_back(std::move(t));
  res.metrics["true_skewness"] = st.true_skewness;
  res.metrics["true_gini"] = st.true_gini;

  const std::vector<int> path{1, 5, 15, 30};
  bool monotone = true;
  for (std::size_t k = 1; k < path.size(); ++k)
    monotone = monotone && std::abs(at[path[k]]->skew_posterior - st.true_skewness) <
                               std::abs(at[path[k - 1]]->skew_posterior - st.true_skewness);
  res.checks.push_back(Check::flag("skewness_gap_decreasing_J_1_5_15_30", monotone));
  res.checks.push_back({"skewness_final_gap", std::abs(at[30]->skew_posterior - 0.47), 0.0, 0.05 - 1e-12});
  res.checks.push_back({"model_skewness_max_abs", max_model, 0.0, 0.0});

  const SkewnessRoutes routes = skewness_dual_route(1000, 5, 0.47, draws_or(o, 200000), 10, o.seed + 1, 0.02);
  res.metrics["dual_route_closed_form"] = routes.closed_form;
  res.metrics["dual_route_simulated"] = routes.simulated;
  res.metrics["dual_route_mc_se"] = routes.mc_se;
  res.checks.push_back({"dual_route_gap_in_se", std::abs(routes.closed_form - routes.simulated) / routes.mc_se, 0.0, 3.0});
  return res;
}

// ------------------------------------------------------------------ figD2

FigureResult run_figD2(const ReproduceOptions& o) {
  FigureResult res;
  res.id = "figD2";
  const int reps = reps_or(o, 100);
  for (std::size_t J : {std::size_t{3}, std::size_t{10}}) {
    const OrderedAsfStudy st = ordered_asf_study(J, 1000, reps, o.seed + J, o.threads);
    const std::string tag = "J" + std::to_string(J);
    Table t{"figD2_" + tag, {"x", "truth", "posterior", "model"}, {}};
    for (std::size_t k = 0; k < st.grid.size(); ++k)
      t.add({st.grid[k], st.truth_mean[k], st.posterior_mean[k], st.model_mean[k]});
    res.tables.push_back(std::move(t));
    res.metrics["mean_mad_posterior_" + tag] = st.mean_mad_posterior;
    res.metrics["mean_mad_model_" + tag] = st.mean_mad_model;
    res.metrics["posterior_wins_" + tag] = st.posterior_wins;
    res.metrics["redrawn_designs_" + tag] = st.redraws;
    if (J == 10) {
      const double needed = std::ceil(0.9 * reps);
      res.checks.push_back({"posterior_wins_J10", static_cast<double>(st.posterior_wins), needed, static_cast<double>(reps)});
    } else {
      const double rel = std::abs(st.mean_mad_posterior - st.mean_mad_model) /
                         std::max(st.mean_mad_posterior, st.mean_mad_model);
      res.checks.push_back({"relative_mad_gap_J3", rel, 0.0, 0.2});
    }
  }
  return res;
}

// ----------------------------------------------------------- binary_ratio

FigureResult run_binary_ratio(const ReproduceOptions&) {
  FigureResult res;
  res.id = "binary_ratio";
  std::vector<double> eta{0.01, 0.05};
  for (int k = 1; k <= 10; ++k) eta.push_back(0.1 * k);
  const auto rows = binary_ratio_curve(eta);
  Table t{"binary_ratio", {"eta", "closed_form", "solver_ratio", "infimum_ratio"}, {}};
  double gap = 0.0;
  for (const auto& r : rows) {
    t.add({r.eta, r.closed_form, r.solver_ratio, r.infimum_ratio});
    gap = std::max(gap, std::abs(r.closed_form - r.solver_ratio));
  }
  res.tables.push_back(std::move(t));
  res.metrics["infimum_ratio_eta_0.01"] = rows[0].infimum_ratio;
  res.checks.push_back({"ratio_eta_0.01", rows[0].closed_form, 1.96, 1.98});
  res.checks.push_back({"closed_form_vs_solver_max_gap", gap, 0.0, 1e-6});
  double max_ratio = 0.0;
  for (const auto& r : rows) max_ratio = std::max(max_ratio, r.infimum_ratio);
  res.checks.push_back({"max_infimum_ratio", max_ratio, 0.0, 2.0 + 1e-6});
  return res;
}

// ---------------------------------------------------------- theorem_sweep

FigureResult run_theorem_sweep(const ReproduceOptions& o) {
  FigureResult res;
  res.id = "theorem_sweep";
  const int instances = reps_or(o, 50);
  const TheoremSweep sw = theorem_sweep(instances, {0.01, 0.1, 1.0}, o.divergence, o.seed, o.threads);
  Table t{"theorem_sweep", {"instance", "epsilon", "bias_ratio", "mse_ratio", "solver_gap"}, {}};
  for (const auto& r : sw.rows)
    t.add({static_cast<double>(r.instance), r.epsilon, r.bias_ratio, r.mse_ratio, r.solver_gap});
  res.tables.push_back(std::move(t));
  res.checks.push_back({"max_bias_ratio", sw.max_bias_ratio, 0.0, 2.0 + 1e-6});
  res.checks.push_back({"max_mse_ratio", sw.max_mse_ratio, 0.0, 4.0 + 1e-6});
  res.checks.push_back({"max_solver_gap", sw.max_solver_gap, 0.0, 1e-5});

  const auto local = local_optimality_sweep(10, 20, o.divergence, o.seed + 1);
  Table lt{"theorem_local",
           {"instance", "posterior_slope", "analytic_slope", "min_candidate_slope", "max_slope_gap", "rel_error"},
           {}};
  bool minimal = true;
  double rel = 0.0;
  for (const auto& r : local) {
    lt.add({static_cast<double>(r.instance), r.posterior_slope, r.analytic_slope, r.min_candidate_slope,
            r.max_slope_gap, r.slope_rel_error});
    minimal = minimal && r.posterior_minimal;
    rel = std::max(rel, r.slope_rel_error);
  }
  res.tables.push_back(std::move(lt));
  res.checks.push_back(Check::flag("posterior_slope_minimal", minimal));
  res.checks.push_back({"max_slope_rel_error", rel, 0.0, 0.01});
  res.checks.push_back({"dirichlet_limit_gap", dirichlet_limit_gap(100, 1e-8, o.seed + 2), 0.0, 1e-6});
  return res;
}

using Runner = std::function<FigureResult(const ReproduceOptions&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> r{
      {"fig1", run_fig1},   {"fig2", run_fig2},         {"fig3", run_fig3},
      {"figD1", run_figD1}, {"figD2", run_figD2},       {"binary_ratio", run_binary_ratio},
      {"theorem_sweep", run_theorem_sweep}};
  return r;
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig1", "fig2", "fig3", "figD1", "figD2", "binary_ratio",
                                            "theorem_sweep"};
  return ids;
}

FigureResult reproduce(const std::string& id, const ReproduceOptions& options) {
  const auto it = runners().find(id);
  if (it == runners().end()) throw ValidationError("unknown figure id '" + id + "'");
  options.divergence.validate();
  return it->second(options);
}

}  // namespace robpost::exp
