#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace robpost::choice {

enum class Normalization { unit_norm, first_slope };

struct MaxScoreOptions {
  Normalization normalization = Normalization::unit_norm;
  int resolution = 401;      // grid points per free dimension
  double slope_range = 4.0;  // free slopes searched on [-range, range] under first_slope
};

/// Maximum score over a deterministic grid: maximizes sum_i (2 y_i - 1) 1{b_0 + x_i'b >= 0}.
/// Returns (b_0, b) with unit norm or with the first slope fixed at 1. At most
/// two free dimensions. With one free dimension the estimate is the midpoint
/// of the longest run of maximizing grid points (the first on ties); with two,
/// the first maximizer in grid order.
Eigen::VectorXd max_score(const std::vector<double>& y, const Eigen::MatrixXd& x, const MaxScoreOptions& options = {});

struct OrderedScoreFit {
  Eigen::VectorXd beta;                // (intercept, slope)
  std::vector<double> intercepts;      // per-threshold estimates with slope fixed at 1
  std::vector<double> used_thresholds;
  std::vector<std::string> warnings;
};

/// Ordered outcomes 1..J with one regressor: per threshold j, maximum score of
/// 1{Y > j} with unit slope; the intercepts are regressed on (1, mu_j) and the
/// coefficients rescaled to (beta_0, beta_1).
OrderedScoreFit ordered_max_score(const std::vector<double>& y, const Eigen::MatrixXd& x,
                                  const std::vector<double>& thresholds, const MaxScoreOptions& options = {});

}  // namespace robpost::choice
