#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "robpost/stats/rng.hpp"

namespace robpost {

using Vector = Eigen::VectorXd;

struct Observation {
  Vector y;
  Vector x;
};
using Sample = std::vector<Observation>;

class ReferenceModel;
using ModelPtr = std::shared_ptr<const ReferenceModel>;

/// Function of the latent variables and covariates.
using LatentMap = std::function<double(const Vector& u, const Vector& x)>;
/// Function of the outcome and covariates.
using OutcomeMap = std::function<double(const Vector& y, const Vector& x)>;

/// A parametric latent-variable model: Y = g(U, X), U | X drawn from a
/// reference density, plus moment functions that hold at the true parameter.
class ReferenceModel {
 public:
  virtual ~ReferenceModel() = default;

  virtual std::string key() const = 0;
  /// Stacked structural and distributional parameters.
  virtual Vector parameters() const = 0;
  virtual ModelPtr with_parameters(const Vector& theta) const = 0;

  virtual Vector draw_latent(const Vector& x, stats::RngStream& rng) const = 0;
  virtual double log_density(const Vector& u, const Vector& x) const = 0;
  virtual Vector outcome(const Vector& u, const Vector& x) const = 0;
  /// Moment functions; mean zero under the reference model.
  virtual Vector moments(const Vector& y, const Vector& x) const = 0;

  /// Predictors used by simulation-based posterior regressions.
  virtual Vector regression_features(const Vector& y, const Vector& x) const;

  /// E[h(U) | Y = y, X = x] under the reference posterior, when tractable.
  virtual std::optional<double> posterior_expectation(const LatentMap& h, const Vector& y, const Vector& x) const;
  /// E[h(U) | X = x] under the reference density, when tractable.
  virtual std::optional<double> prior_expectation(const LatentMap& h, const Vector& x) const;

  /// Influence function of the parameter estimator at one observation, in
  /// the order of parameters(). Empty when the parameters are treated as known.
  virtual Vector influence(const Vector& y, const Vector& x) const;
};

/// Scalar quantity of interest delta(U, X). The optional maps give exact
/// conditional means under a given model; when empty the model's quadrature
/// hooks or simulation are used instead.
struct Target {
  std::string name;
  std::function<double(const ReferenceModel&, const Vector& u, const Vector& x)> delta;
  std::function<double(const ReferenceModel&, const Vector& y, const Vector& x)> posterior_mean;
  std::function<double(const ReferenceModel&, const Vector& x)> model_mean;

  LatentMap bind(const ReferenceModel& model) const;
};

/// Target with no closed forms attached.
Target make_target(std::string name, LatentMap delta);

/// Draws (U, Y) under the reference model, cycling through covariate rows.
struct ReferenceDraws {
  std::vector<Vector> u;
  std::vector<Vector> y;
  std::vector<std::size_t> row;  // index into `covariates`
  std::vector<Vector> covariates;

  std::size_t size() const { return u.size(); }
  const Vector& x(std::size_t s) const { return covariates[row[s]]; }
};

ReferenceDraws simulate_reference(const ReferenceModel& model, const std::vector<Vector>& covariates,
                                  std::size_t draws, stats::RngStream& rng);

/// Distinct covariate rows and, for each input row, the index of its group.
struct CovariateGroups {
  std::vector<Vector> distinct;
  std::vector<std::size_t> group_of;
  std::vector<std::size_t> count;
};
CovariateGroups group_covariates(const std::vector<Vector>& rows);

/// Covariate rows of a sample.
std::vector<Vector> covariates_of(const Sample& data);

/// Simulated data set from the reference model at the given covariates.
Sample simulate_sample(const ReferenceModel& model, const std::vector<Vector>& covariates, stats::RngStream& rng);

}  // namespace robpost
