#pragma once

#include <memory>
#include <string>
#include <vector>

#include "robpost/framework/model.hpp"
#include "robpost/stats/smoothing.hpp"

namespace robpost {

/// Point estimate with a Monte Carlo standard error (0 for exact evaluations).
struct Estimate {
  double value = 0.0;
  double mc_se = 0.0;
  std::vector<std::string> warnings;
};

/// Conditional expectation map (y, x) -> E[delta | Y = y, X = x].
class PosteriorLaw {
 public:
  enum class Kind { closed_form, simulated };

  /// Exact map from the target's posterior_mean, else the model's quadrature.
  static PosteriorLaw closed_form(ModelPtr model, const Target& target);

  double operator()(const Vector& y, const Vector& x) const;
  /// Simulated laws only: the query lies outside the box spanned by the
  /// simulated features, or the regression had to widen its bandwidth.
  bool extrapolates(const Vector& y, const Vector& x) const;

  Kind kind() const { return kind_; }
  const std::string& target_name() const { return name_; }
  /// Training R^2 of the surrogate (1 for closed forms).
  double training_r2() const { return r2_; }

 private:
  friend std::vector<PosteriorLaw> sim_posterior_fit(ModelPtr, const std::vector<Vector>&, std::size_t,
                                                     const stats::KernelSpec&, const std::vector<Target>&,
                                                     stats::RngStream&);
  PosteriorLaw() = default;
  Vector features(const Vector& y, const Vector& x) const;

  Kind kind_ = Kind::closed_form;
  std::string name_;
  ModelPtr model_;
  OutcomeMap exact_;
  std::shared_ptr<const stats::NwRegressor> surrogate_;
  Vector scale_, lo_, hi_;
  double r2_ = 1.0;
};

/// Exact E[delta | Y, X] as a function, or throws if neither the target nor
/// the model provides one.
OutcomeMap posterior_mean_map(const ReferenceModel& model, const Target& target);
/// Exact E[delta | X] as a function; returns nullopt where unavailable.
std::function<std::optional<double>(const Vector&)> model_mean_map(const ReferenceModel& model, const Target& target);

/// Average over the sample of E[delta | X_i] by simulation, S draws per
/// distinct covariate row.
Estimate model_based_estimate(const ReferenceModel& model, const Target& target, const Sample& data, std::size_t draws,
                              stats::RngStream& rng);
/// Same average with exact conditional means.
Estimate model_based_estimate_exact(const ReferenceModel& model, const Target& target, const Sample& data);

/// Average over the sample of E[delta | Y_i, X_i].
Estimate posterior_average_estimate(const PosteriorLaw& law, const Sample& data);
std::vector<Estimate> posterior_average_estimate(const std::vector<PosteriorLaw>& laws, const Sample& data);

/// Simulation-based posterior: draws S latent vectors per distinct covariate
/// row and regresses each target on the standardized regression features.
/// All targets share one simulated design.
std::vector<PosteriorLaw> sim_posterior_fit(ModelPtr model, const std::vector<Vector>& covariates, std::size_t draws,
                                            const stats::KernelSpec& spec, const std::vector<Target>& targets,
                                            stats::RngStream& rng);

/// Functional of the latent distribution linearized at the reference.
struct LinearizedFunctional {
  double value_at_reference = 0.0;
  LatentMap influence;
};

/// value + average over the sample of E[influence | Y_i, X_i] - E[influence | X_i],
/// using the model's quadrature hooks.
Estimate nonlinear_effect(const ReferenceModel& model, const Sample& data, const LinearizedFunctional& functional);

}  // namespace robpost
