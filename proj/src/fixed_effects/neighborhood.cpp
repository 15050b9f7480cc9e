#include "robpost/fixed_effects/neighborhood.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "robpost/error.hpp"
#include "robpost/stats/distributions.hpp"
#include "robpost/stats/normal.hpp"
#include "robpost/stats/summary.hpp"

namespace robpost::fe {

namespace {

double wmean(const Eigen::VectorXd& x, const Eigen::VectorXd& w) { return x.dot(w) / w.sum(); }

double wvar(const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
  const double m = wmean(x, w);
  return (x.array() - m).square().matrix().dot(w) / w.sum();
}

struct Components {
  Eigen::VectorXd center;
  Eigen::VectorXd sd;
};

Components mixture_components(const SummaryEffects& s, double var_mu, NoiseMode mode, const Eigen::VectorXd* prior_mean,
                              const Eigen::VectorXd& w) {
  require(var_mu > 0.0, "posterior density: var_mu must be positive");
  const auto n = s.size();
  Components c{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  const double common_rho = var_mu / (var_mu + wmean(s.noise_var, w));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double rho = mode == NoiseMode::common ? common_rho : var_mu / (var_mu + s.noise_var(i));
    const double m = prior_mean ? (*prior_mean)(i) : 0.0;
    c.center(i) = m + rho * (s.effect(i) - m);
    c.sd(i) = std::sqrt(var_mu * (1.0 - rho));
  }
  return c;
}

const Eigen::VectorXd& pick_weights(const SummaryEffects& s, const Eigen::VectorXd* weights) {
  if (weights) {
    require(weights->size() == s.size(), "posterior density: weight length mismatch");
    require(weights->sum() > 0.0, "posterior density: weights sum to zero");
    return *weights;
  }
  return s.weight;
}

}  // namespace

NeighborhoodFit fit_neighborhood(const SummaryEffects& summary, const NeighborhoodOptions& options) {
  summary.validate();
  require(options.trim_top >= 0.0 && options.trim_top < 1.0, "fit_neighborhood: trim share must lie in [0, 1)");
  NeighborhoodFit fit;
  const auto n = summary.size();
  if (options.precision_weights) {
    require((summary.noise_var.array() > 0.0).all(), "fit_neighborhood: precision weights need positive noise");
    fit.weights = summary.noise_var.cwiseInverse();
  } else {
    fit.weights = summary.weight;
    if (options.trim_top > 0.0) {
      std::vector<double> nv(summary.noise_var.data(), summary.noise_var.data() + n);
      const double cut = stats::quantile(nv, 1.0 - options.trim_top);
      for (Eigen::Index i = 0; i < n; ++i)
        if (summary.noise_var(i) > cut) {
          fit.weights(i) = 0.0;
          ++fit.trimmed;
        }
    }
  }
  require(fit.weights.sum() > 0.0, "fit_neighborhood: no weight left after trimming");
  fit.decomposition = decompose_variance(wvar(summary.effect, fit.weights), wmean(summary.noise_var, fit.weights));
  const double rho = fit.decomposition.shrinkage;
  fit.var_posterior_means = rho * rho * fit.decomposition.var_total;
  fit.var_posterior_average = fit.decomposition.var_signal * (1.0 - rho) + fit.var_posterior_means;
  return fit;
}

std::vector<double> posterior_density_hetero(const SummaryEffects& summary, double var_mu,
                                             std::span<const double> grid, NoiseMode mode,
                                             const Eigen::VectorXd* prior_mean, const Eigen::VectorXd* weights) {
  const auto& w = pick_weights(summary, weights);
  const Components c = mixture_components(summary, var_mu, mode, prior_mean, w);
  const double total = w.sum();
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < summary.size(); ++i) {
      if (w(i) == 0.0) continue;
      acc += w(i) * stats::normal_pdf((grid[g] - c.center(i)) / c.sd(i)) / c.sd(i);
    }
    out[g] = acc / total;
  }
  return out;
}

MixtureMoments posterior_density_moments(const SummaryEffects& summary, double var_mu, NoiseMode mode,
                                         const Eigen::VectorXd* prior_mean, const Eigen::VectorXd* weights) {
  const auto& w = pick_weights(summary, weights);
  const Components c = mixture_components(summary, var_mu, mode, prior_mean, w);
  const double m = wmean(c.center, w);
  return {m, wvar(c.center, w) + wmean(c.sd.array().square().matrix(), w)};
}

CreFit fit_correlated_random_effects(const SummaryEffects& summary, const Eigen::MatrixXd& W) {
  summary.validate();
  require(W.rows() == summary.size(), "correlated random effects: W must have one row per unit");
  const Eigen::MatrixXd gram = W.transpose() * summary.weight.asDiagonal() * W;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram);
  const auto& sv = svd.singularValues();
  CreFit fit;
  fit.condition_number = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(fit.condition_number < 1e12)) {
    std::ostringstream msg;
    msg << "correlated random effects: covariates not full rank (Gram condition number " << fit.condition_number
        << ")";
    throw ValidationError(msg.str());
  }
  fit.theta = gram.ldlt().solve(W.transpose() * summary.weight.asDiagonal() * summary.effect);
  fit.prior_mean = W * fit.theta;
  const Eigen::VectorXd resid = summary.effect - fit.prior_mean;
  const double resid_var = resid.array().square().matrix().dot(summary.weight) / summary.weight.sum();
  fit.decomposition = decompose_variance(resid_var, wmean(summary.noise_var, summary.weight));
  return fit;
}

SummaryEffects simulate_summary(std::size_t units, double var_mu, double mean_noise, double sdlog,
                                stats::RngStream& rng, Eigen::VectorXd* true_effects) {
  require(units >= 2, "simulate_summary: need at least two units");
  require(var_mu > 0.0 && mean_noise > 0.0, "simulate_summary: variances must be positive");
  const auto n = static_cast<Eigen::Index>(units);
  SummaryEffects s;
  s.effect.resize(n);
  s.noise_var.resize(n);
  s.weight.resize(n);
  Eigen::VectorXd mu(n);
  const stats::CenteredLogNormal lognormal{var_mu, sdlog};
  const double noise_shape = 4.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    mu(i) = sdlog > 0.0 ? lognormal.sample(rng) : std::sqrt(var_mu) * rng.normal();
    s.noise_var(i) = mean_noise / noise_shape * stats::draw_gamma(noise_shape, rng);
    s.effect(i) = mu(i) + std::sqrt(s.noise_var(i)) * rng.normal();
    s.weight(i) = std::exp(rng.normal());
    s.unit_ids.push_back(std::to_string(i + 1));
  }
  if (true_effects) *true_effects = mu;
  return s;
}

}  // namespace robpost::fe
