#include "robpost/fixed_effects/params.hpp"

#include <cmath>

#include "robpost/error.hpp"

namespace robpost::fe {

double FeParams::shrinkage() const {
  const double denom = var_alpha + noise_var();
  return denom > 0.0 ? var_alpha / denom : 0.0;
}

double FeParams::sd_alpha() const { return std::sqrt(var_alpha); }

double FeParams::posterior_sd() const { return std::sqrt(var_alpha * (1.0 - shrinkage())); }

void FeParams::validate() const {
  require(J >= 1, "fixed effects: J must be positive");
  require(var_alpha >= 0.0 && var_eps >= 0.0, "fixed effects: variances must be nonnegative");
  require(var_alpha + var_eps > 0.0, "fixed effects: variances cannot both be zero");
  require(std::isfinite(mu_alpha), "fixed effects: non-finite mean");
}

FeParams estimate_params(const PanelData& panel, std::optional<double> known_var_eps) {
  const auto n = panel.units();
  const auto J = panel.periods();
  if (n < 2) throw ValidationError("estimate_params: need at least two units");
  require(J >= 1, "estimate_params: need at least one measurement per unit");
  if (J == 1 && !known_var_eps)
    throw IdentificationError("estimate_params: with J = 1 the variance split needs an external noise variance");

  const Eigen::VectorXd ybar = panel.unit_means();
  FeParams p;
  p.J = static_cast<int>(J);
  p.mu_alpha = ybar.mean();
  const double var_ybar = (ybar.array() - p.mu_alpha).square().mean();
  if (known_var_eps) {
    require(*known_var_eps >= 0.0, "estimate_params: noise variance must be nonnegative");
    p.var_eps = *known_var_eps;
  } else {
    const double within = (panel.y.colwise() - ybar).squaredNorm();
    p.var_eps = within / static_cast<double>(n * (J - 1));
  }
  const double va = var_ybar - p.var_eps / static_cast<double>(J);
  p.truncated = va < 0.0;
  p.var_alpha = std::max(0.0, va);
  p.validate();
  return p;
}

VarianceDecomposition decompose_variance(double var_total, double mean_noise) {
  require(var_total > 0.0, "decompose_variance: total variance must be positive");
  require(mean_noise >= 0.0, "decompose_variance: noise variance must be nonnegative");
  VarianceDecomposition d;
  d.var_total = var_total;
  d.mean_noise = mean_noise;
  d.truncated = var_total < mean_noise;
  d.var_signal = std::max(0.0, var_total - mean_noise);
  d.shrinkage = d.var_signal / (d.var_signal + mean_noise);
  return d;
}

}  // namespace robpost::fe
