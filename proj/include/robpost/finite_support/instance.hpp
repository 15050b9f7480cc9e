#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "robpost/stats/rng.hpp"

namespace robpost::fs {

/// Latent variable with finite support u_1..u_K. Support points sharing an
/// outcome value g_k form one observational class; classes are numbered by
/// increasing g.
struct DiscreteInstance {
  std::vector<double> support;
  Eigen::VectorXd ref_weights;  // K, positive, sums to one
  std::vector<double> g_values; // K
  Eigen::VectorXd delta;        // K
  Eigen::MatrixXd psi;          // K x m, moment functions at g_k (m may be 0)
  Eigen::VectorXd counts;       // L, observed class counts

  std::size_t size() const { return static_cast<std::size_t>(ref_weights.size()); }
  std::size_t classes() const { return static_cast<std::size_t>(counts.size()); }
  /// Class index of each support point.
  std::vector<std::size_t> class_index() const;
  /// Throws ValidationError when any invariant fails.
  void validate() const;

  static DiscreteInstance from_json(const std::string& text);
  std::string to_json() const;
};

/// Number of distinct outcome values.
std::size_t count_classes(const std::vector<double>& g_values);

struct PosteriorReduction {
  Eigen::VectorXd class_means;  // L
  double estimate = 0.0;
};

PosteriorReduction posterior_reduce(const DiscreteInstance& inst);

/// Posterior mean of sum_k omega_k delta_k under a Dirichlet(M omega^U) prior.
double dirichlet_posterior_mean(const DiscreteInstance& inst, double concentration);

/// Expected class values under the reference weights, per support point.
Eigen::VectorXd expand(const DiscreteInstance& inst, const Eigen::VectorXd& per_class);

/// Random instance: K in [2, 5], Dirichlet(1) weights, delta ~ U[-1, 1],
/// L <= min(K, 4) classes by random surjection, moment functions depending on
/// the class only and centred under the reference weights, counts ~ 1 + Poisson-like.
DiscreteInstance random_instance(stats::RngStream& rng);

/// Three-cell discretization of the binary-choice model with one covariate
/// value: index_obs = X'beta for the data, index_cf = x'beta for the
/// counterfactual, standard normal latent. delta = 1{index_cf + U >= 0},
/// Y = 1{index_obs + U >= 0}. Requires index_cf > index_obs.
DiscreteInstance binary_choice_instance(double index_obs, double index_cf);

}  // namespace robpost::fs
