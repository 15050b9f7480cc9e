#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "robpost/data/panel.hpp"
#include "robpost/fixed_effects/params.hpp"
#include "robpost/stats/rng.hpp"

namespace robpost::fe {

enum class NoiseMode {
  common,   // one shrinkage factor from the average noise variance
  per_unit  // unit-specific shrinkage from each unit's own noise variance
};

struct NeighborhoodOptions {
  double trim_top = 0.01;          // drop units above this upper quantile of noise variance
  bool precision_weights = false;  // weight by 1/noise_var instead of population weights (no trimming)
};

struct NeighborhoodFit {
  VarianceDecomposition decomposition;
  Eigen::VectorXd weights;  // weights actually used (zero for trimmed units)
  std::size_t trimmed = 0;
  double var_posterior_means = 0.0;   // weighted variance of the shrunk effects (common shrinkage)
  double var_posterior_average = 0.0; // variance implied by the posterior average density
};

/// Variance decomposition of noisy unit effects with known noise variances.
NeighborhoodFit fit_neighborhood(const SummaryEffects& summary, const NeighborhoodOptions& options = {});

/// Density of the posterior average estimator on `grid`: a weighted mixture
/// of unit posteriors. `prior_mean` (one entry per unit) defaults to zero.
std::vector<double> posterior_density_hetero(const SummaryEffects& summary, double var_mu,
                                             std::span<const double> grid, NoiseMode mode = NoiseMode::common,
                                             const Eigen::VectorXd* prior_mean = nullptr,
                                             const Eigen::VectorXd* weights = nullptr);

/// Mean and variance of the mixture returned by posterior_density_hetero.
struct MixtureMoments {
  double mean = 0.0;
  double variance = 0.0;
};
MixtureMoments posterior_density_moments(const SummaryEffects& summary, double var_mu,
                                         NoiseMode mode = NoiseMode::common,
                                         const Eigen::VectorXd* prior_mean = nullptr,
                                         const Eigen::VectorXd* weights = nullptr);

/// Prior mean linear in unit covariates, fitted by weighted least squares;
/// the variance decomposition is then done on residuals.
struct CreFit {
  Eigen::VectorXd theta;
  Eigen::VectorXd prior_mean;
  VarianceDecomposition decomposition;
  double condition_number = 0.0;
};
CreFit fit_correlated_random_effects(const SummaryEffects& summary, const Eigen::MatrixXd& W);

/// Synthetic unit effects: true effects from a centred log-normal (sdlog > 0)
/// or a normal (sdlog = 0) with variance var_mu, noise variances from a gamma
/// with mean `mean_noise`, log-normal population weights.
SummaryEffects simulate_summary(std::size_t units, double var_mu, double mean_noise, double sdlog,
                                stats::RngStream& rng, Eigen::VectorXd* true_effects = nullptr);

}  // namespace robpost::fe
