#pragma once

#include <Eigen/Core>
#include <optional>

#include "robpost/data/panel.hpp"

namespace robpost::fe {

/// Normal reference model Y_ij = alpha_i + eps_ij.
struct FeParams {
  double mu_alpha = 0.0;
  double var_alpha = 1.0;
  double var_eps = 1.0;
  int J = 1;
  /// Set when the moment estimate of var_alpha was negative and clipped to 0.
  bool truncated = false;

  double noise_var() const { return var_eps / J; }
  double shrinkage() const;
  double sd_alpha() const;
  /// Mean of alpha given a unit mean ybar.
  double posterior_mean(double ybar) const { return mu_alpha + shrinkage() * (ybar - mu_alpha); }
  /// Standard deviation of alpha given a unit mean.
  double posterior_sd() const;
  void validate() const;
};

/// Minimum distance on first and second moments. Needs J >= 2 unless the
/// transitory variance is supplied.
FeParams estimate_params(const PanelData& panel, std::optional<double> known_var_eps = std::nullopt);

struct VarianceDecomposition {
  double var_total = 0.0;   // variance of the noisy effects
  double mean_noise = 0.0;  // average noise variance
  double var_signal = 0.0;  // var_total - mean_noise, clipped at 0
  double shrinkage = 0.0;   // var_signal / var_total
  bool truncated = false;
};

VarianceDecomposition decompose_variance(double var_total, double mean_noise);

}  // namespace robpost::fe
