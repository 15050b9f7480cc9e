// Acceptance gate: criteria 1-12 at their stated tolerances and runtime
// budgets. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "robpost/choice/choice.hpp"
#include "robpost/experiments/studies.hpp"
#include "robpost/fixed_effects/estimators.hpp"
#include "robpost/fixed_effects/params.hpp"
#include "robpost/fixed_effects/simulate.hpp"
#include "robpost/stats/distributions.hpp"
#include "robpost/stats/rng.hpp"

using namespace robpost;
using namespace robpost::exp;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

int failures = 0;

void run(int id, const char* title, double budget_s, const std::function<Outcome()>& body, double carried_s = 0.0) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() + carried_s;
  const bool ok = out.pass && secs < budget_s;
  if (!ok) ++failures;
  std::printf("%s criterion %d: %s | %s | %.2f s (budget %.0f s)%s\n", ok ? "PASS" : "FAIL", id, title,
              out.detail.c_str(), secs, budget_s, out.pass && !ok ? " | over budget" : "");
  std::fflush(stdout);
}

// Gauss-Hermite rule for weight exp(-x^2) by Golub-Welsch.
void gauss_hermite(int m, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
  for (int k = 1; k < m; ++k) jac(k, k - 1) = jac(k - 1, k) = std::sqrt(k / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  nodes = es.eigenvalues();
  weights = std::sqrt(M_PI) * es.eigenvectors().row(0).transpose().array().square();
}

double mean_of(const Eigen::VectorXd& v) { return v.mean(); }

}  // namespace

int main() {
  const std::uint64_t seed = stats::seed_from_env(20240607);
  std::printf("acceptance seed %llu\n", static_cast<unsigned long long>(seed));
  const DivergenceSpec chi2;

  run(1, "neighborhood variance split", 1.0, [] {
    const auto d = fe::decompose_variance(kNeighborhoodVarTotal, kNeighborhoodMeanNoise);
    const bool ok = std::abs(d.var_signal - 0.030) <= 0.001 && std::abs(d.shrinkage - 0.38) <= 0.005;
    return Outcome{ok, fmt("signal variance %.6f (target .030 +- .001), shrinkage %.6f (target .38 +- .005)",
                           d.var_signal, d.shrinkage)};
  });

  run(2, "posterior distribution moments", 10.0, [seed] {
    // Each unit's posterior is normal; its first two moments are integrated by
    // Gauss-Hermite and also evaluated through the closed forms in the data.
    Eigen::VectorXd gh_x, gh_w;
    gauss_hermite(12, gh_x, gh_w);
    stats::RngStream rng(seed);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      const int J = 2 + static_cast<int>(rng.uniform() * 8.0);
      const std::size_t n = 50 + static_cast<std::size_t>(rng.uniform() * 400.0);
      const double var_alpha = 0.2 + 2.0 * rng.uniform(), var_eps = 0.2 + 3.0 * rng.uniform();
      const double mean_alpha = 2.0 * rng.uniform() - 1.0;
      const PanelData panel =
          fe::simulate_panel(n, J, stats::Normal{mean_alpha, std::sqrt(var_alpha)}, var_eps, rng);
      fe::FeParams p = fe::estimate_params(panel);
      if (p.truncated) continue;
      const Eigen::VectorXd ybar = panel.unit_means();
      const fe::Moments got = fe::posterior_moments(ybar, p);

      const double noise = p.var_eps / p.J;
      const double rho = p.var_alpha / (p.var_alpha + noise);
      const double post_sd = std::sqrt(p.var_alpha * noise / (p.var_alpha + noise));
      double m1 = 0.0, m2 = 0.0;
      for (Eigen::Index i = 0; i < ybar.size(); ++i) {
        const double center = p.mu_alpha + rho * (ybar(i) - p.mu_alpha);
        for (Eigen::Index k = 0; k < gh_x.size(); ++k) {
          const double a = center + std::sqrt(2.0) * post_sd * gh_x(k);
          m1 += gh_w(k) / std::sqrt(M_PI) * a;
          m2 += gh_w(k) / std::sqrt(M_PI) * a * a;
        }
      }
      m1 /= static_cast<double>(ybar.size());
      m2 /= static_cast<double>(ybar.size());
      const double yy = mean_of(ybar);
      const double closed_mean = p.mu_alpha + rho * (yy - p.mu_alpha);
      const double closed_var = rho * rho * (ybar.array() - yy).square().mean() + (1.0 - rho) * p.var_alpha;
      worst = std::max({worst, std::abs(got.mean - m1), std::abs(got.variance - (m2 - m1 * m1)),
                        std::abs(got.mean - closed_mean), std::abs(got.variance - closed_var)});
    }
    const auto d = fe::decompose_variance(kNeighborhoodVarTotal, kNeighborhoodMeanNoise);
    const double var_pm = d.shrinkage * d.shrinkage * d.var_total;
    const bool ok = worst <= 1e-10 && std::abs(var_pm - 0.011) <= 0.001;
    return Outcome{ok, fmt("max moment error %.3g over 100 data sets (tol 1e-10); variance of posterior means %.5f "
                           "(target .011 +- .001)",
                           worst, var_pm)};
  });

  run(3, "neighborhood informativeness", 120.0, [seed] {
    const auto d = fe::decompose_variance(kNeighborhoodVarTotal, kNeighborhoodMeanNoise);
    const R2Calibration base = neighborhood_r2(d.var_signal, d.mean_noise, 50000, seed);
    const R2Calibration tenth = neighborhood_r2(d.var_signal, 0.1 * d.mean_noise, 50000, seed + 1);
    const bool ok = base.weighted_mean >= 0.004 && base.weighted_mean <= 0.008 && base.weighted_p95 >= 0.009 &&
                    base.weighted_p95 <= 0.015 && tenth.weighted_mean >= 0.19 && tenth.weighted_mean <= 0.25;
    return Outcome{ok, fmt("weighted mean R2 %.4f [.004, .008], 95th pct %.4f [.009, .015], noise/10 mean %.4f "
                           "[.19, .25]",
                           base.weighted_mean, base.weighted_p95, tenth.weighted_mean)};
  });

  run(4, "density ordering across noise levels", 120.0, [seed] {
    const auto d = fe::decompose_variance(kNeighborhoodVarTotal, kNeighborhoodMeanNoise);
    const DensityStudy st =
        neighborhood_density_study(50000, d.var_signal, d.mean_noise, 1.0, {1.0, 1.0 / 3.0, 0.1}, seed);
    const double published[] = {0.38, 0.65, 0.86};
    bool ok = st.scenarios[0].sup_distance > st.scenarios[1].sup_distance &&
              st.scenarios[1].sup_distance > st.scenarios[2].sup_distance;
    for (int k = 0; k < 3; ++k) ok = ok && std::abs(st.scenarios[k].design_shrinkage - published[k]) <= 0.01;
    return Outcome{ok, fmt("sup distances %.4f > %.4f > %.4f; shrinkage ", st.scenarios[0].sup_distance,
                           st.scenarios[1].sup_distance, st.scenarios[2].sup_distance) +
                           fmt("%.4f / %.4f / %.4f (.38/.65/.86 +- .01)", st.scenarios[0].design_shrinkage,
                               st.scenarios[1].design_shrinkage, st.scenarios[2].design_shrinkage)};
  });

  std::optional<TheoremSweep> sweep;
  double sweep_secs = 0.0;
  run(5, "bias ratio sweep and binary tightness", 300.0, [&] {
    const auto start = std::chrono::steady_clock::now();
    sweep = theorem_sweep(50, {0.01, 0.1, 1.0}, chi2, seed, 1);
    sweep_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto tight = binary_ratio_curve({0.01});
    const double closed = choice::worst_case_bias_closed_form(0.01, 0.0).ratio;
    const bool ok = sweep->max_bias_ratio <= 2.0 + 1e-6 && sweep->max_solver_gap <= 1e-5 &&
                    tight[0].solver_ratio >= 1.96 && tight[0].solver_ratio <= 1.98 && closed >= 1.96 &&
                    closed <= 1.98;
    return Outcome{ok, fmt("max ratio %.6f (<= 2 + 1e-6), max solver gap %.3g (<= 1e-5), eta=.01 ratio %.5f "
                           "(solver) %.5f (closed form) in [1.96, 1.98]",
                           sweep->max_bias_ratio, sweep->max_solver_gap, tight[0].solver_ratio, closed)};
  });

  run(6, "local optimality of the posterior slope", 300.0, [&] {
    const auto rows = local_optimality_sweep(10, 20, chi2, seed + 1);
    bool minimal = true;
    double rel = 0.0, gap = INFINITY;
    for (const auto& r : rows) {
      minimal = minimal && r.posterior_minimal;
      rel = std::max(rel, r.slope_rel_error);
      gap = std::min(gap, r.min_candidate_slope - r.posterior_slope);
    }
    const bool ok = rows.size() == 10 && minimal && rel <= 0.01;
    return Outcome{ok, fmt("%.0f instances x 20 candidates: posterior minimal %.0f (tol 1e-4), smallest candidate "
                           "excess %.3g, max analytic slope rel error %.3g (<= .01)",
                           static_cast<double>(rows.size()), minimal ? 1.0 : 0.0, gap, rel)};
  });

  run(
      7, "prediction ratio sweep", 300.0,
      [&] {
        if (!sweep) return Outcome{false, "sweep from criterion 5 unavailable"};
        return Outcome{sweep->max_mse_ratio <= 4.0 + 1e-6,
                       fmt("max ratio %.6f over %.0f instance-radius pairs (<= 4 + 1e-6), same sweep as criterion 5",
                           sweep->max_mse_ratio, static_cast<double>(sweep->rows.size()))};
      },
      sweep_secs);

  run(8, "skewness: closed form, simulation route and J path", 600.0, [seed] {
    const SkewnessRoutes routes = skewness_dual_route(1000, 5, 0.47, 200000, 10, seed + 1, 0.02);
    const double z = std::abs(routes.closed_form - routes.simulated) / routes.mc_se;
    const SkewGiniStudy st = skewness_gini_study({1, 5, 15, 30}, 1000, 100, 0.47, seed, 1);
    bool monotone = true;
    double model_max = 0.0;
    for (std::size_t k = 0; k < st.points.size(); ++k) {
      model_max = std::max(model_max, st.points[k].max_abs_skew_model);
      if (k > 0)
        monotone = monotone && std::abs(st.points[k].skew_posterior - 0.47) < std::abs(st.points[k - 1].skew_posterior - 0.47);
    }
    const double final_gap = std::abs(st.points.back().skew_posterior - 0.47);
    const bool ok = z <= 3.0 && monotone && final_gap < 0.05 && model_max == 0.0;
    return Outcome{ok, fmt("routes differ by %.2f MC se (<= 3); means over J=1,5,15,30: ", z) +
                           fmt("%.4f %.4f %.4f %.4f", st.points[0].skew_posterior, st.points[1].skew_posterior,
                               st.points[2].skew_posterior, st.points[3].skew_posterior) +
                           fmt(" (monotone %.0f, final gap %.4f < .05); model max |skew| %.3g (= 0)", monotone ? 1.0 : 0.0,
                               final_gap, model_max)};
  });

  run(9, "ordered choice structural function", 900.0, [seed] {
    const OrderedAsfStudy ten = ordered_asf_study(10, 1000, 100, seed + 10, 1);
    const OrderedAsfStudy three = ordered_asf_study(3, 1000, 100, seed + 3, 1);
    const double rel = std::abs(three.mean_mad_posterior - three.mean_mad_model) /
                       std::max(three.mean_mad_posterior, three.mean_mad_model);
    const bool ok = ten.posterior_wins >= 90 && rel <= 0.2;
    return Outcome{ok, fmt("10 categories: posterior closer in %.0f of 100 (>= 90); 3 categories: MAD %.4f vs %.4f, "
                           "relative gap %.3f (<= .20)",
                           ten.posterior_wins, three.mean_mad_posterior, three.mean_mad_model, rel)};
  });

  run(10, "specification test size", 600.0, [seed] {
    const SizeStudy s = specification_test_size(1000, 4, 500, 20000, seed, 1);
    return Outcome{s.rate >= 0.03 && s.rate <= 0.07,
                   fmt("%.0f rejections in %.0f replications, rate %.4f in [.03, .07]", s.rejections, s.reps, s.rate)};
  });

  run(11, "income nulls and signatures", 120.0, [seed] {
    std::vector<double> tau;
    for (int k = 1; k <= 9; ++k) tau.push_back(0.1 * k);
    const IncomeNull null = income_gaussian_null(100000, tau, seed + 2);
    const IncomeSignature sig = income_peakedness(20000, seed + 3);
    const double gap = income_additive_gap(1000, seed + 4);
    const bool pattern = sig.eta_low > 0 && sig.eta_high < 0 && sig.eps_low > 0 && sig.eps_high < 0;
    const bool ok = null.max_abs_eta <= 0.01 && null.max_abs_eps <= 0.01 && pattern && gap <= 1e-10;
    return Outcome{ok, fmt("gaussian max |curve| %.4f (eta) %.4f (eps) <= .01; ", null.max_abs_eta, null.max_abs_eps) +
                           fmt("peakedness eta %+.4f/%+.4f eps %+.4f/%+.4f", sig.eta_low, sig.eta_high, sig.eps_low,
                               sig.eps_high) +
                           fmt(" (pattern %.0f); additive gap %.3g <= 1e-10", pattern ? 1.0 : 0.0, gap)};
  });

  run(12, "dirichlet limit", 1.0, [seed] {
    const double gap = dirichlet_limit_gap(100, 1e-8, seed + 2);
    return Outcome{gap < 1e-6, fmt("max gap %.3g over 100 instances (< 1e-6)", gap)};
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
