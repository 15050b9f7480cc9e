#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "robpost/error.hpp"
#include "robpost/experiments/studies.hpp"
#include "robpost/fixed_effects/estimators.hpp"
#include "robpost/fixed_effects/neighborhood.hpp"
#include "robpost/fixed_effects/simulate.hpp"
#include "robpost/framework/models.hpp"
#include "robpost/framework/posterior.hpp"
#include "robpost/robustness/inference.hpp"
#include "robpost/robustness/local.hpp"
#include "robpost/stats/distributions.hpp"
#include "robpost/stats/normal.hpp"
#include "robpost/stats/parallel.hpp"
#include "robpost/stats/quadrature.hpp"
#include "robpost/stats/smoothing.hpp"
#include "robpost/stats/summary.hpp"

namespace robpost::exp {

namespace {

std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (points - 1.0);
  return g;
}

double mean_of(const std::vector<double>& v) { return stats::mean(v); }

double sd_of(const std::vector<double>& v) { return v.size() > 1 ? std::sqrt(stats::sample_variance(v)) : 0.0; }

}  // namespace

// ---------------------------------------------------------------- neighborhoods

R2Calibration neighborhood_r2(double var_signal, double noise_var, std::size_t draws, std::uint64_t seed,
                              int grid_points) {
  require(var_signal > 0.0 && noise_var > 0.0, "neighborhood_r2: variances must be positive");
  require(grid_points >= 3, "neighborhood_r2: need at least three cutoffs");
  fe::FeParams p;
  p.var_alpha = var_signal;
  p.var_eps = noise_var;
  p.J = 1;
  const auto model = std::make_shared<FixedEffectsModel>(p, true);
  stats::RngStream rng(seed);
  const ReferenceSimulation sim(*model, {Vector(0)}, draws, rng);

  R2Calibration out;
  const double sd = std::sqrt(var_signal);
  // Cutoffs in the far tails with no simulated reference draw on one side have
  // an undefined ratio; they are reported as NaN and carry no weight.
  std::vector<double> r2_kept, w_kept;
  double total = 0.0;
  for (double z : linspace(-4.0, 4.0, grid_points)) {
    const Target t = fe_indicator_target(sd * z);
    double r2 = std::numeric_limits<double>::quiet_NaN(), se = r2;
    try {
      const Informativeness info = informativeness(sim, *model, t, PosteriorLaw::closed_form(model, t));
      r2 = info.r2;
      se = info.r2_se;
    } catch (const ValidationError&) {
    }
    const double w = std::isfinite(r2) ? stats::normal_pdf(z) : 0.0;
    out.a.push_back(sd * z);
    out.weight.push_back(w);
    out.r2.push_back(r2);
    out.r2_se.push_back(se);
    if (w > 0.0) {
      r2_kept.push_back(r2);
      w_kept.push_back(w);
    }
    total += w;
  }
  for (auto& w : out.weight) w /= total;
  out.weighted_mean = stats::weighted_mean(r2_kept, w_kept);
  out.weighted_p95 = stats::weighted_quantile(r2_kept, w_kept, 0.95);
  return out;
}

DensityStudy neighborhood_density_study(std::size_t units, double var_mu, double noise_var, double sdlog,
                                        const std::vector<double>& noise_fractions, std::uint64_t seed) {
  require(units >= 2, "neighborhood_density_study: need at least two units");
  require(var_mu > 0.0 && noise_var > 0.0 && sdlog > 0.0, "neighborhood_density_study: invalid calibration");
  const stats::CenteredLogNormal truth{var_mu, sdlog};
  const auto n = static_cast<Eigen::Index>(units);
  const stats::RngStream base(seed);
  stats::RngStream effect_rng = base.split(0);
  Eigen::VectorXd mu(n);
  for (Eigen::Index i = 0; i < n; ++i) mu(i) = truth.sample(effect_rng);

  DensityStudy out;
  const double sd = std::sqrt(var_mu);
  out.grid = linspace(-3.0 * sd, 6.0 * sd, 721);
  for (double g : out.grid) out.truth.push_back(truth.density(g));

  for (std::size_t k = 0; k < noise_fractions.size(); ++k) {
    const double f = noise_fractions[k];
    require(f > 0.0, "neighborhood_density_study: noise fractions must be positive");
    stats::RngStream noise_rng = base.split(k + 1);
    SummaryEffects s;
    s.noise_var = Eigen::VectorXd::Constant(n, f * noise_var);
    s.weight = Eigen::VectorXd::Ones(n);
    s.effect.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) s.effect(i) = mu(i) + std::sqrt(f * noise_var) * noise_rng.normal();

    fe::NeighborhoodOptions opt;
    opt.trim_top = 0.0;
    const auto fit = fe::fit_neighborhood(s, opt);
    const Eigen::VectorXd center = Eigen::VectorXd::Constant(n, s.effect.mean());
    DensityScenario sc;
    sc.noise_fraction = f;
    sc.design_shrinkage = var_mu / (var_mu + f * noise_var);
    sc.estimated_shrinkage = fit.decomposition.shrinkage;
    sc.posterior = fe::posterior_density_hetero(s, fit.decomposition.var_signal, out.grid, fe::NoiseMode::common,
                                                &center);
    const double prior_sd = std::sqrt(fit.decomposition.var_signal);
    for (std::size_t g = 0; g < out.grid.size(); ++g) {
      sc.prior.push_back(prior_sd > 0.0 ? stats::normal_pdf((out.grid[g] - center(0)) / prior_sd) / prior_sd : 0.0);
      sc.sup_distance = std::max(sc.sup_distance, std::abs(sc.posterior[g] - out.truth[g]));
    }
    out.scenarios.push_back(std::move(sc));
  }
  return out;
}

NeighborhoodFigure neighborhood_figure(const SummaryEffects& summary, const fe::NeighborhoodOptions& options,
                                       int grid_points) {
  const auto fit = fe::fit_neighborhood(summary, options);
  const auto n = summary.size();
  std::vector<double> effect(summary.effect.data(), summary.effect.data() + n);
  std::vector<double> weight(fit.weights.data(), fit.weights.data() + n);
  const double center = stats::weighted_mean(effect, weight);

  NeighborhoodFigure out;
  out.var_total = fit.decomposition.var_total;
  out.mean_noise = fit.decomposition.mean_noise;
  out.var_signal = fit.decomposition.var_signal;
  out.shrinkage = fit.decomposition.shrinkage;
  out.var_posterior_means = fit.var_posterior_means;
  out.trimmed = fit.trimmed;

  const double sd_total = std::sqrt(out.var_total);
  out.grid = linspace(center - 5.0 * sd_total, center + 5.0 * sd_total, grid_points);
  out.effect_density = stats::kde(effect, weight, stats::KernelSpec{}, out.grid);
  const Eigen::VectorXd prior_mean = Eigen::VectorXd::Constant(n, center);
  out.posterior = fe::posterior_density_hetero(summary, out.var_signal, out.grid, fe::NoiseMode::common, &prior_mean,
                                               &fit.weights);
  const double sd_signal = std::sqrt(out.var_signal);
  for (double g : out.grid) {
    out.normal_fit.push_back(stats::normal_pdf((g - center) / sd_total) / sd_total);
    out.prior.push_back(sd_signal > 0.0 ? stats::normal_pdf((g - center) / sd_signal) / sd_signal : 0.0);
  }
  return out;
}

SummaryEffects synthetic_neighborhoods(std::uint64_t seed, std::size_t units) {
  stats::RngStream rng(seed);
  return fe::simulate_summary(units, kNeighborhoodVarTotal - kNeighborhoodMeanNoise, kNeighborhoodMeanNoise, 0.0, rng);
}

// ------------------------------------------------------------ fixed effects

double skew_normal_gini(double skewness) {
  const auto sn = stats::standardized_skew_normal(stats::skew_normal_delta_for_skewness(skewness));
  const double kappa = sn.delta / std::sqrt(1.0 - sn.delta * sn.delta);
  auto density = [&](double a) {
    const double z = (a - sn.location) / sn.scale;
    return 2.0 / sn.scale * stats::normal_pdf(z) * stats::normal_cdf(kappa * z);
  };
  // Cumulative distribution on a fine grid, then G = int F (1 - F) e^a da / E[e^alpha].
  const double lo = sn.location - 12.0 * sn.scale, hi = sn.location + 12.0 * sn.scale;
  const int m = 200000;
  const double h = (hi - lo) / m;
  double F = 0.0, num = 0.0, mean_exp = 0.0;
  double prev_f = density(lo);
  double prev_term = 0.0;
  for (int k = 1; k <= m; ++k) {
    const double a = lo + k * h;
    const double f = density(a);
    F += 0.5 * h * (prev_f + f);
    mean_exp += 0.5 * h * (prev_f * std::exp(a - h) + f * std::exp(a));
    const double term = F * (1.0 - F) * std::exp(a);
    num += 0.5 * h * (prev_term + term);
    prev_term = term;
    prev_f = f;
  }
  return num / mean_exp;
}

SkewGiniStudy skewness_gini_study(const std::vector<int>& J_values, std::size_t n, int reps, double skewness,
                                  std::uint64_t seed, unsigned threads) {
  require(reps >= 2, "skewness_gini_study: need at least two replications");
  const stats::Distribution alpha = stats::standardized_skew_normal(stats::skew_normal_delta_for_skewness(skewness));
  SkewGiniStudy out;
  out.true_skewness = stats::population_skewness(alpha);
  out.true_gini = skew_normal_gini(skewness);
  const stats::RngStream base(seed);
  for (int J : J_values) {
    require(J >= 1, "skewness_gini_study: J must be positive");
    const auto R = static_cast<std::size_t>(reps);
    std::vector<double> sp(R), sm(R), gp(R), gm(R);
    stats::parallel_for(R, threads, [&](std::size_t r) {
      stats::RngStream rng = base.split((static_cast<std::uint64_t>(J) << 32) | r);
      const PanelData panel = fe::simulate_panel(n, J, alpha, 1.0, rng);
      const fe::FeParams p = J >= 2 ? fe::estimate_params(panel) : fe::estimate_params(panel, 1.0);
      const Eigen::VectorXd ybar = panel.unit_means();
      sp[r] = fe::skewness_posterior(ybar, p);
      sm[r] = fe::skewness_model(p);
      gp[r] = fe::gini_posterior(ybar, p).value;
      gm[r] = fe::gini_model(p);
    });
    SkewGiniPoint pt;
    pt.J = J;
    pt.skew_posterior = mean_of(sp);
    pt.skew_posterior_sd = sd_of(sp);
    pt.skew_model = mean_of(sm);
    for (double v : sm) pt.max_abs_skew_model = std::max(pt.max_abs_skew_model, std::abs(v));
    pt.gini_posterior = mean_of(gp);
    pt.gini_posterior_sd = sd_of(gp);
    pt.gini_model = mean_of(gm);
    out.points.push_back(pt);
  }
  return out;
}

SkewnessRoutes skewness_dual_route(std::size_t n, int J, double skewness, std::size_t draws, int replicates,
                                   std::uint64_t seed, double bandwidth) {
  require(J >= 2, "skewness_dual_route: needs J >= 2");
  require(bandwidth >= 0.0, "skewness_dual_route: bandwidth must be nonnegative");
  stats::KernelSpec kernel;
  if (bandwidth > 0.0) kernel.bandwidth = bandwidth;
  require(replicates >= 2, "skewness_dual_route: need at least two replicates");
  const stats::Distribution alpha = stats::standardized_skew_normal(stats::skew_normal_delta_for_skewness(skewness));
  const stats::RngStream base(seed);
  stats::RngStream data_rng = base.split(0);
  const PanelData panel = fe::simulate_panel(n, J, alpha, 1.0, data_rng);
  const fe::FeParams p = fe::estimate_params(panel);

  SkewnessRoutes out;
  out.closed_form = fe::skewness_posterior(panel.unit_means(), p);

  const auto model = std::make_shared<FixedEffectsModel>(p);
  const double mu = p.mu_alpha, sd = p.sd_alpha();
  const Target cube = make_target("standardized_cube", [mu, sd](const Vector& u, const Vector&) {
    const double z = (u(0) - mu) / sd;
    return z * z * z;
  });
  const Sample data = fe_observations(panel);
  std::vector<double> est;
  for (int b = 0; b < replicates; ++b) {
    stats::RngStream rng = base.split(static_cast<std::uint64_t>(b) + 1);
    const auto laws = sim_posterior_fit(model, {Vector(0)}, draws, kernel, {cube}, rng);
    est.push_back(posterior_average_estimate(laws[0], data).value);
  }
  out.simulated = mean_of(est);
  out.mc_se = sd_of(est) / std::sqrt(static_cast<double>(est.size()));
  return out;
}

SizeStudy specification_test_size(std::size_t n, int J, int reps, std::size_t draws, std::uint64_t seed,
                                  unsigned threads) {
  require(J >= 2 && reps >= 1, "specification_test_size: need J >= 2 and at least one replication");
  const auto R = static_cast<std::size_t>(reps);
  SizeStudy out;
  out.reps = reps;
  out.p_values.assign(R, 1.0);
  const stats::RngStream base(seed);
  const Target t = fe_indicator_target(0.0);
  stats::parallel_for(R, threads, [&](std::size_t r) {
    stats::RngStream rng = base.split(r);
    const PanelData panel = fe::simulate_panel(n, J, stats::Normal{0.0, 1.0}, 2.0, rng);
    const FixedEffectsModel model(fe::estimate_params(panel));
    out.p_values[r] = specification_test(model, fe_observations(panel), t, draws, rng).p_value;
  });
  for (double pv : out.p_values)
    if (pv < 0.05) ++out.rejections;
  out.rate = static_cast<double>(out.rejections) / reps;
  return out;
}

}  // namespace robpost::exp
