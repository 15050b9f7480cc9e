#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "robpost/framework/model.hpp"
#include "robpost/framework/posterior.hpp"
#include "robpost/robustness/divergence.hpp"

namespace robpost {

struct RobustnessOptions {
  std::size_t draws = 50000;
  std::vector<double> epsilon_grid{0.0, 1e-4, 1e-3, 1e-2};
  /// Conditional means given X use group averages up to this many distinct rows.
  std::size_t max_groups = 100;
};

/// Reference simulation with conditional centering given X.
class ReferenceSimulation {
 public:
  ReferenceSimulation(const ReferenceModel& model, const std::vector<Vector>& covariates, std::size_t draws,
                      stats::RngStream& rng, std::size_t max_groups = 100);

  const ReferenceDraws& draws() const { return draws_; }
  std::size_t size() const { return draws_.size(); }
  /// values - E[values | X], column by column.
  Eigen::MatrixXd center(const Eigen::MatrixXd& values) const;
  Eigen::VectorXd center(const Eigen::VectorXd& values) const;
  /// Moment functions at each draw, centered given X.
  const Eigen::MatrixXd& centered_moments() const { return psi_tilde_; }

 private:
  ReferenceDraws draws_;
  std::vector<std::size_t> group_;  // empty when X is continuous
  std::size_t groups_ = 0;
  Eigen::MatrixXd x_;
  Eigen::MatrixXd psi_tilde_;
};

/// Least-squares coefficient of `target` on the columns of `design`, with
/// near-collinear directions removed (a warning is appended when that happens).
Eigen::VectorXd projection_coefficients(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                                        std::vector<std::string>& warnings);

struct BiasReport {
  double leading = 0.0;
  double slope = 0.0;
  Eigen::VectorXd lambda;
  std::vector<double> epsilon;
  std::vector<double> envelope;  // leading + sqrt(eps) * slope
  double leading_se = 0.0;
  double slope_se = 0.0;
  std::vector<std::string> warnings;
};

/// Leading term and sqrt(eps) coefficient of the worst-case bias of the
/// estimator with map `gamma` over a divergence neighborhood of the reference.
BiasReport local_bias(const ReferenceModel& model, const std::vector<Vector>& covariates, const OutcomeMap& gamma,
                      const Target& target, const DivergenceSpec& div, const RobustnessOptions& options,
                      stats::RngStream& rng);
BiasReport local_bias(const ReferenceSimulation& sim, const ReferenceModel& model, const OutcomeMap& gamma,
                      const Target& target, const DivergenceSpec& div, const std::vector<double>& epsilon_grid);

/// R^2 of the posterior conditioning and the ratio of the worst-case biases
/// of the posterior and model-based estimators.
struct Informativeness {
  double r2 = 0.0;
  double ratio = 0.0;
  double r2_se = 0.0;
  double var_v = 0.0;
  Eigen::VectorXd lambda;
  std::vector<std::string> warnings;
};

/// `posterior` gives E[delta | Y, X]; E[delta | X] comes from the target's
/// closed form or the model's quadrature when available, else from the
/// simulation itself.
Informativeness informativeness(const ReferenceSimulation& sim, const ReferenceModel& model, const Target& target,
                                const PosteriorLaw& posterior);
double informativeness_r2(const ReferenceSimulation& sim, const ReferenceModel& model, const Target& target,
                          const PosteriorLaw& posterior);
double bias_ratio(const ReferenceSimulation& sim, const ReferenceModel& model, const Target& target,
                  const PosteriorLaw& posterior);

struct PredictionErrorReport {
  double leading = 0.0;  // E[(gamma - delta)^2]
  double slope = 0.0;
  Eigen::VectorXd lambda;
  double leading_se = 0.0;
  /// Third posterior moment of delta vanishes (checked by quadrature when the
  /// model supports it, by a Monte Carlo moment test otherwise).
  bool zero_posterior_skewness = false;
  double skewness_statistic = 0.0;
  std::vector<std::string> warnings;
};

PredictionErrorReport prediction_error_expansion(const ReferenceSimulation& sim, const ReferenceModel& model,
                                                 const OutcomeMap& gamma, const Target& target,
                                                 const PosteriorLaw& posterior, const DivergenceSpec& div);

}  // namespace robpost
