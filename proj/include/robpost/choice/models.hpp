#pragma once

#include "robpost/choice/censored.hpp"
#include "robpost/choice/choice.hpp"
#include "robpost/framework/model.hpp"

namespace robpost::choice {

/// Shared pieces of the normal latent-index models: latent U ~ N(0, sigma^2),
/// observation y = (Y), x = regressors without the constant.
class IndexModelBase : public ReferenceModel {
 public:
  explicit IndexModelBase(ChoiceModelSpec spec);
  const ChoiceModelSpec& spec() const { return spec_; }

  /// (beta, sigma).
  Vector parameters() const override;
  Vector draw_latent(const Vector& x, stats::RngStream& rng) const override;
  double log_density(const Vector& u, const Vector& x) const override;
  std::optional<double> prior_expectation(const LatentMap& h, const Vector& x) const override;

 protected:
  ChoiceModelSpec spec_;
};

/// Y = max(Y*, 0). Moments are the Tobit scores; the influence function uses
/// `information` when it is supplied.
class CensoredModel final : public IndexModelBase {
 public:
  explicit CensoredModel(ChoiceModelSpec spec, Eigen::MatrixXd information = {});
  std::string key() const override { return "censored"; }
  ModelPtr with_parameters(const Vector& theta) const override;
  Vector outcome(const Vector& u, const Vector& x) const override;
  Vector moments(const Vector& y, const Vector& x) const override;
  Vector regression_features(const Vector& y, const Vector& x) const override;
  std::optional<double> posterior_expectation(const LatentMap& h, const Vector& y, const Vector& x) const override;
  Vector influence(const Vector& y, const Vector& x) const override;

 private:
  Eigen::MatrixXd information_;
};

/// Y = 1{Y* > 0}. The slope vector is treated as known (maximum score is not
/// a likelihood estimator); the moment is the probit score in sigma.
class BinaryChoiceModel final : public IndexModelBase {
 public:
  using IndexModelBase::IndexModelBase;
  std::string key() const override { return "binary_choice"; }
  ModelPtr with_parameters(const Vector& theta) const override;
  Vector outcome(const Vector& u, const Vector& x) const override;
  Vector moments(const Vector& y, const Vector& x) const override;
  std::optional<double> posterior_expectation(const LatentMap& h, const Vector& y, const Vector& x) const override;
};

/// Y = j when mu_{j-1} < Y* <= mu_j. Moment: ordered probit score in sigma.
class OrderedChoiceModel final : public IndexModelBase {
 public:
  explicit OrderedChoiceModel(ChoiceModelSpec spec);
  std::string key() const override { return "ordered_choice"; }
  ModelPtr with_parameters(const Vector& theta) const override;
  Vector outcome(const Vector& u, const Vector& x) const override;
  Vector moments(const Vector& y, const Vector& x) const override;
  std::optional<double> posterior_expectation(const LatentMap& h, const Vector& y, const Vector& x) const override;
};

/// Converts choice data into framework observations.
Sample to_sample(const ChoiceData& data);

/// delta = 1{x*'beta + U >= 0} with closed-form conditional means.
Target binary_asf_target(Eigen::VectorXd x_star);
/// delta = ordered category at x*.
Target ordered_asf_target(Eigen::VectorXd x_star);
/// delta = h(X'beta + U) for the censored model.
Target censored_outcome_target(const OutcomeFunction& h, std::string name = "h(Y*)");

}  // namespace robpost::choice
