#pragma once

#include <Eigen/Core>

#include "robpost/data/panel.hpp"
#include "robpost/fixed_effects/params.hpp"
#include "robpost/framework/model.hpp"

namespace robpost {

/// Normal fixed-effects model reduced to sufficient statistics.
/// Latent: (alpha, mean noise, within-unit variance) when J >= 2, else
/// (alpha, mean noise). Outcome: (unit mean, within-unit variance) or (unit mean).
/// Parameters: (mu_alpha, var_alpha, var_eps), or (mu_alpha, var_alpha) when
/// the transitory variance is known.
class FixedEffectsModel final : public ReferenceModel {
 public:
  explicit FixedEffectsModel(fe::FeParams params, bool noise_known = false);

  const fe::FeParams& params() const { return params_; }
  bool noise_known() const { return noise_known_; }

  std::string key() const override { return "fixed_effects"; }
  Vector parameters() const override;
  ModelPtr with_parameters(const Vector& theta) const override;
  Vector draw_latent(const Vector& x, stats::RngStream& rng) const override;
  double log_density(const Vector& u, const Vector& x) const override;
  Vector outcome(const Vector& u, const Vector& x) const override;
  Vector moments(const Vector& y, const Vector& x) const override;
  Vector regression_features(const Vector& y, const Vector& x) const override;
  /// Integrates over alpha given the unit mean; exact for any target.
  std::optional<double> posterior_expectation(const LatentMap& h, const Vector& y, const Vector& x) const override;
  /// Integrates over (alpha, mean noise) with the within-unit variance at its
  /// mean; exact for targets that do not depend on the third latent.
  std::optional<double> prior_expectation(const LatentMap& h, const Vector& x) const override;
  /// Influence function of the moment estimator in fe::estimate_params.
  Vector influence(const Vector& y, const Vector& x) const override;

 private:
  bool has_within() const { return params_.J >= 2; }
  fe::FeParams params_;
  bool noise_known_;
};

/// One observation per panel unit: (unit mean, within-unit variance).
Sample fe_observations(const PanelData& panel);

/// delta = 1{alpha <= a}, with closed-form conditional means.
Target fe_indicator_target(double a);
/// delta = alpha.
Target fe_level_target();

/// Gaussian linear regression Y = X'beta + U, U ~ N(0, sigma^2), with a point
/// mass posterior for U. Parameters: (beta, sigma^2).
class LinearRegressionModel final : public ReferenceModel {
 public:
  /// `gram` is the sample second moment of X; when given, influence() returns
  /// the least-squares influence function.
  LinearRegressionModel(Eigen::VectorXd beta, double sigma2, Eigen::MatrixXd gram = {});

  const Eigen::VectorXd& beta() const { return beta_; }
  double sigma2() const { return sigma2_; }

  std::string key() const override { return "linear_regression"; }
  Vector parameters() const override;
  ModelPtr with_parameters(const Vector& theta) const override;
  Vector draw_latent(const Vector& x, stats::RngStream& rng) const override;
  double log_density(const Vector& u, const Vector& x) const override;
  Vector outcome(const Vector& u, const Vector& x) const override;
  Vector moments(const Vector& y, const Vector& x) const override;
  std::optional<double> posterior_expectation(const LatentMap& h, const Vector& y, const Vector& x) const override;
  std::optional<double> prior_expectation(const LatentMap& h, const Vector& x) const override;
  Vector influence(const Vector& y, const Vector& x) const override;

 private:
  Eigen::VectorXd beta_;
  double sigma2_;
  Eigen::MatrixXd gram_;
};

/// Least squares with the 1/n residual variance.
LinearRegressionModel fit_linear_regression(const Sample& data);

}  // namespace robpost
