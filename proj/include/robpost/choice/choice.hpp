#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "robpost/framework/posterior.hpp"
#include "robpost/stats/distributions.hpp"
#include "robpost/stats/rng.hpp"

namespace robpost::choice {

/// Latent index model Y* = beta_0 + x'beta_slope + U with U ~ N(0, sigma^2).
/// `thresholds` holds the interior cut points mu_1 < ... < mu_{J-1} for ordered
/// outcomes (empty for binary and censored outcomes).
struct ChoiceModelSpec {
  Eigen::VectorXd beta;  // intercept first
  double sigma = 1.0;
  std::vector<double> thresholds;

  void validate() const;
  std::size_t categories() const { return thresholds.size() + 1; }
  double index(const Eigen::VectorXd& x) const;
};

/// Outcomes with regressors; `x` excludes the constant.
struct ChoiceData {
  std::vector<double> y;
  Eigen::MatrixXd x;  // n x d

  std::size_t size() const { return y.size(); }
  void validate() const;
};

/// Phi(index(x) / sigma).
double asf_model(const ChoiceModelSpec& spec, const Eigen::VectorXd& x);

/// Average over observations of P(x'beta + U >= 0 | Y_i, X_i). Observations
/// with a numerically degenerate Phi(X_i'beta / sigma) are dropped with a warning.
Estimate asf_posterior(const ChoiceModelSpec& spec, const ChoiceData& data, const Eigen::VectorXd& x);
/// One observation's contribution P(x'beta + U >= 0 | Y_i = y, X_i = xi); nullopt when degenerate.
std::optional<double> asf_posterior_term(const ChoiceModelSpec& spec, double y, const Eigen::VectorXd& xi,
                                         const Eigen::VectorXd& x);

struct ClosedFormBias {
  double bias_model = 0.0;
  double bias_posterior = 0.0;
  double ratio = 0.0;
};

/// Unconstrained worst-case biases of the model-based and posterior ASF in the
/// single-covariate binary model; requires target_index > data_index.
ClosedFormBias worst_case_bias_closed_form(double target_index, double data_index);

enum class AsfMode { model, posterior };

/// Ordered-choice average structural function sum_j j P(category j at x).
Estimate ordered_asf(const ChoiceModelSpec& spec, const ChoiceData& data, const Eigen::VectorXd& x, AsfMode mode);
/// E[category at x | Y_i = y, X_i = xi]; nullopt when the observed interval has no mass.
std::optional<double> ordered_asf_term(const ChoiceModelSpec& spec, double y, const Eigen::VectorXd& xi,
                                       const Eigen::VectorXd& x);
/// Category 1 + #{mu_j < y*}.
double ordered_category(const ChoiceModelSpec& spec, double latent_index);

/// Ordered-choice ASF when U follows `error` instead of the reference normal.
double ordered_asf_under(const ChoiceModelSpec& spec, const stats::Distribution& error, const Eigen::VectorXd& x);

/// Ordered probit log-likelihood in sigma given beta; maximized by golden
/// section on log sigma over [1e-3, 1e3].
double fit_ordered_sigma(const ChoiceModelSpec& spec, const ChoiceData& data);
/// Probit log-likelihood in sigma for binary data.
double fit_probit_sigma(const ChoiceModelSpec& spec, const ChoiceData& data);

/// Sorted U(lo, hi) cut points for J categories.
std::vector<double> draw_thresholds(std::size_t categories, stats::RngStream& rng, double lo = -2.0, double hi = 2.0);

/// Single standard-normal regressor, U from `error` scaled by `spec.sigma`.
/// Outcome: ordered category (1..J) when thresholds are set, else binary 1{Y* > 0}.
ChoiceData simulate_choice(const ChoiceModelSpec& spec, const stats::Distribution& error, std::size_t n,
                           stats::RngStream& rng);
/// Censored outcome max(Y*, 0) with a single standard-normal regressor.
ChoiceData simulate_censored(const ChoiceModelSpec& spec, const stats::Distribution& error, std::size_t n,
                             stats::RngStream& rng);

/// E[f(U) | lo < U <= hi] for U ~ N(0, sigma^2); either bound may be infinite.
/// Tail intervals are integrated after factoring out the density at the
/// nearer bound, so they do not underflow.
double truncated_normal_expectation(const std::function<double(double)>& f, double sigma, double lo, double hi);

/// Phi(hi) - Phi(lo) without cancellation in either tail.
double normal_mass(double lo, double hi);

/// CDF of the supported error laws (normal, recentred chi-square, uniform).
double error_cdf(const stats::Distribution& error, double u);

/// Columns y, x1..xd.
ChoiceData read_choice_csv(std::istream& in);
void write_choice_csv(std::ostream& out, const ChoiceData& data);

}  // namespace robpost::choice
