#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "robpost/data/panel.hpp"
#include "robpost/framework/model.hpp"
#include "robpost/stats/rng.hpp"

namespace robpost::income {

/// Permanent-transitory income process over T periods:
///   Y_t = eta_t + eps_t,  eta_t = eta_{t-1} + V_t,
/// with eta_1, V_t and eps_t mutually independent and mean zero.
struct PtParams {
  double var_eta1 = 0.0;
  Eigen::VectorXd var_v;    // periods 2..T (length T - 1)
  Eigen::VectorXd var_eps;  // periods 1..T

  int periods() const { return static_cast<int>(var_eps.size()); }
  void validate() const;
  /// Var(eta_t), t = 1..T.
  Eigen::VectorXd eta_variances() const;
  /// T x T covariance of (Y_1, ..., Y_T).
  Eigen::MatrixXd covariance() const;

  static PtParams stationary(int periods, double var_eta1, double var_v, double var_eps);
};

/// Synthetic calibration with magnitudes typical of residual log household
/// earnings over six biennial waves.
PtParams psid_like_params();

struct PtFit {
  PtParams params;
  Eigen::MatrixXd empirical_covariance;
  std::vector<std::string> truncated;  // parameters set to zero
  std::vector<std::string> warnings;
};

/// Equally weighted minimum distance on all autocovariances of the demeaned
/// panel. Var(V_T) is tied to Var(V_{T-1}), since only their sum with
/// Var(eps_T) enters Var(Y_T). Negative variances are truncated at zero.
PtFit estimate_pt(const PanelData& panel);

enum class Component { eta, eps };
Component parse_component(const std::string& name);
std::string component_name(Component c);

/// Gaussian conditioning of eta_t or eps_t on the full vector Y_i (zero prior
/// means). Weights and posterior standard deviations are computed once.
class PtPosterior {
 public:
  explicit PtPosterior(PtParams params);

  const PtParams& params() const { return params_; }
  /// E[component_t | Y] = weights(c, t) . Y  (t is zero-based).
  const Eigen::VectorXd& weights(Component c, int t) const;
  double sd(Component c, int t) const;
  double mean(Component c, int t, const Eigen::VectorXd& y) const;
  /// n x T matrix of posterior means for a panel.
  Eigen::MatrixXd means(const PanelData& panel, Component c) const;
  /// Reference standard deviation of component_t.
  double prior_sd(Component c, int t) const;

 private:
  PtParams params_;
  std::vector<Eigen::VectorXd> w_eta_, w_eps_;
  Eigen::VectorXd sd_eta_, sd_eps_;
};

/// Posterior estimate of the distribution of one component across units.
/// Outcomes are demeaned by period before conditioning, matching the
/// zero-mean reference.
class ComponentDistribution {
 public:
  ComponentDistribution(const PanelData& panel, const PtParams& params, Component c);

  /// (1/n) sum_i Phi((a - m_it) / s_t).
  double cdf(int t, double a) const;
  /// Inverse of cdf by bisection (bracket widened until it contains tau).
  double quantile(int t, double tau, double tol = 1e-8) const;
  /// Normal reference quantile sqrt(Var(component_t)) * Phi^{-1}(tau).
  double model_quantile(int t, double tau) const;
  int periods() const { return static_cast<int>(sd_.size()); }

 private:
  Eigen::MatrixXd means_;
  Eigen::VectorXd sd_, prior_sd_;
};

double posterior_component_cdf(const PanelData& panel, const PtParams& params, Component c, int t, double a);

struct QuantileCurve {
  std::vector<double> tau;
  std::vector<double> difference;  // period average of posterior minus model quantile
};

QuantileCurve quantile_difference_curve(const PanelData& panel, const PtParams& params, Component c,
                                        const std::vector<double>& tau);

/// Reference model with latent u = (eta_1..eta_T, eps_1..eps_T), outcome
/// y = eta + eps and moments Y_t Y_s - Cov(Y_t, Y_s) for s <= t.
class PermanentTransitoryModel final : public ReferenceModel {
 public:
  explicit PermanentTransitoryModel(PtParams params);
  const PtParams& params() const { return params_; }
  const PtPosterior& posterior() const { return posterior_; }

  std::string key() const override { return "perm_transitory"; }
  /// (var_eta1, var_v, var_eps).
  Vector parameters() const override;
  ModelPtr with_parameters(const Vector& theta) const override;
  Vector draw_latent(const Vector& x, stats::RngStream& rng) const override;
  double log_density(const Vector& u, const Vector& x) const override;
  Vector outcome(const Vector& u, const Vector& x) const override;
  Vector moments(const Vector& y, const Vector& x) const override;

 private:
  PtParams params_;
  PtPosterior posterior_;
};

/// delta = 1{component_t <= a} with Gaussian closed forms.
Target component_indicator_target(Component c, int t, double a);

struct R2Curve {
  std::vector<double> tau;
  std::vector<double> r2;     // average over periods
  std::vector<double> r2_se;  // average of the per-period batch-means errors
};

/// Informativeness R^2 of the posterior for 1{component_t <= model quantile(tau)},
/// averaged over periods, from one reference simulation with `draws` draws.
R2Curve pt_informativeness(const PtParams& params, Component c, const std::vector<double>& tau, std::size_t draws,
                           stats::RngStream& rng);

/// Data generator. `scale_mixture` multiplies eta_1, the permanent shocks and
/// the transitory component by sqrt(w), w in {w_lo, w_hi} with P(w_hi) = mixture_prob,
/// w_hi / w_lo = mixture_ratio and E[w] = 1, so variances are preserved.
struct PtSimulationConfig {
  PtParams params;
  bool scale_mixture = false;
  double mixture_prob = 0.1;
  double mixture_ratio = 10.0;
  bool mix_permanent = true;
  bool mix_transitory = true;

  void validate() const;
  /// Keys: var_eta1, var_v (number or array), var_eps (number or array),
  /// periods (with scalar variances), shape ("gaussian" | "scale_mixture"),
  /// mixture_prob, mixture_ratio, mix_permanent, mix_transitory.
  static PtSimulationConfig from_json(const std::string& text);
};

PanelData simulate_pt(const PtSimulationConfig& config, std::size_t n, stats::RngStream& rng);

}  // namespace robpost::income
