#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "robpost/fixed_effects/params.hpp"

namespace robpost::fe {

// Distribution estimators for alpha. All take the vector of unit means.

/// Empirical distribution of the fixed-effects estimates.
double cdf_fe(const Eigen::VectorXd& ybar, double a);
/// Empirical distribution of the empirical Bayes means.
double cdf_pm(const Eigen::VectorXd& ybar, const FeParams& params, double a);
/// Posterior average estimator: average of the unit posterior CDFs.
double cdf_posterior(const Eigen::VectorXd& ybar, const FeParams& params, double a);
/// Model-based estimator: the fitted normal CDF.
double cdf_model(const FeParams& params, double a);

/// Mean and variance of the distribution behind cdf_posterior.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};
Moments posterior_moments(const Eigen::VectorXd& ybar, const FeParams& params);

Eigen::VectorXd empirical_bayes_means(const Eigen::VectorXd& ybar, const FeParams& params);

enum class ProjectionMode { posterior, fe };

struct Projection {
  Eigen::VectorXd coefficients;
  double condition_number = 0.0;
};

/// Least-squares coefficients of the empirical Bayes means (posterior mode)
/// or of the unit means (fe mode) on the rows of W.
Projection project_on_covariates(const Eigen::VectorXd& ybar, const FeParams& params, const Eigen::MatrixXd& W,
                                 ProjectionMode mode);

double skewness_posterior(const Eigen::VectorXd& ybar, const FeParams& params);
inline double skewness_model(const FeParams&) { return 0.0; }

/// Gini coefficient of exp(alpha) under the fitted normal.
double gini_model(const FeParams& params);
/// Influence function of the Gini coefficient at the fitted normal.
double gini_gradient(const FeParams& params, double alpha);

struct GiniResult {
  double value = 0.0;
  double correction = 0.0;
  std::vector<std::string> warnings;
};

/// Model-based Gini plus the averaged posterior correction, using
/// Gauss-Hermite quadrature with `nodes` points (checked against 2x nodes).
GiniResult gini_posterior(const Eigen::VectorXd& ybar, const FeParams& params, int nodes = 64);

}  // namespace robpost::fe
