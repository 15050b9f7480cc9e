#pragma once

#include <functional>

#include "robpost/choice/choice.hpp"

namespace robpost::choice {

using OutcomeFunction = std::function<double(double)>;

/// E[h(m + s Z) | m + s Z <= 0], Z standard normal. The density is rescaled
/// by phi(z0) so deep tails do not underflow.
double censored_cell_expectation(const OutcomeFunction& h, double mean, double sd);

/// Closed form for h = identity: m - s phi(m/s) / Phi(-m/s).
double censored_cell_mean(double mean, double sd);

/// Observed h(Y_i) for uncensored units, imputed conditional mean for censored ones.
Estimate censored_posterior(const ChoiceModelSpec& spec, const ChoiceData& data, const OutcomeFunction& h);

/// Average over X_i of E[h(X_i'beta + U)] under the reference normal.
Estimate censored_model_estimate(const ChoiceModelSpec& spec, const ChoiceData& data, const OutcomeFunction& h);

struct TobitFit {
  ChoiceModelSpec spec;
  double log_likelihood = 0.0;
  Eigen::MatrixXd information;  // mean outer product of scores in (beta, sigma)
};

/// Gaussian censored-regression maximum likelihood (Nelder-Mead on beta, log sigma,
/// started from least squares).
TobitFit fit_tobit(const ChoiceData& data);

/// Per-observation score of the Tobit log-likelihood in (beta, sigma).
Eigen::VectorXd tobit_score(const ChoiceModelSpec& spec, double y, const Eigen::VectorXd& x);

}  // namespace robpost::choice
