#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "robpost/framework/model.hpp"
#include "robpost/robustness/local.hpp"

namespace robpost {

/// Joint asymptotic covariance of (model-based, posterior average) estimators.
/// Index 0 is the model-based estimator, index 1 the posterior average.
struct AsymptoticVariance {
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Zero();
  Eigen::VectorXd g_model;      // gradient of the model-based mean in the parameters
  Eigen::VectorXd g_posterior;  // gradient of the posterior average in the parameters
  bool projected = false;       // set when sigma was projected onto the PSD cone
  std::vector<std::string> warnings;

  double model_variance() const { return sigma(0, 0); }
  double posterior_variance() const { return sigma(1, 1); }
  /// Variance of the difference of the two estimators.
  double difference_variance() const { return sigma(0, 0) + sigma(1, 1) - 2.0 * sigma(0, 1); }
};

/// Gradients by central differences on the model parameters (relative step
/// 1e-5, checked against half the step); the covariance is a reference
/// simulation of E[delta|Y,X], E[delta|X] and the model's influence function.
/// Requires exact conditional means for the target.
AsymptoticVariance asymptotic_variance(const ReferenceModel& model, const Sample& data, const Target& target,
                                       const ReferenceSimulation& sim);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double half_width = 0.0;
};

/// estimate +- (sqrt(eps) slope + z sqrt(sigma22 / n)).
Interval bias_aware_ci(double estimate, double slope, double sigma22, std::size_t n, double epsilon,
                       double level = 0.95);

struct SpecificationTest {
  double statistic = 0.0;
  double p_value = 1.0;
  double posterior_estimate = 0.0;
  double model_estimate = 0.0;
  double difference_variance = 0.0;
  std::vector<std::string> warnings;
};

/// n (posterior - model)^2 / Var(difference), compared with chi-square(1).
SpecificationTest specification_test(const ReferenceModel& model, const Sample& data, const Target& target,
                                     const ReferenceSimulation& sim);
SpecificationTest specification_test(const ReferenceModel& model, const Sample& data, const Target& target,
                                     std::size_t draws, stats::RngStream& rng);

/// {leading, slope, lambda[], epsilon[], envelope[], mc_se}
std::string bias_report_json(const BiasReport& report);

}  // namespace robpost
