#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "robpost/framework/model.hpp"
#include "robpost/robustness/divergence.hpp"

namespace robpost::exp {

/// String-valued parameter bag. Functions taking a mutable map fill in every
/// default they use, so the map ends up as the resolved configuration.
using ParamMap = std::map<std::string, std::string>;

double param_number(ParamMap& p, const std::string& key, double fallback);
std::string param_text(ParamMap& p, const std::string& key, const std::string& fallback);
std::vector<double> parse_number_list(const std::string& text);

// ------------------------------------------------------------------- DGPs

struct SimulatedData {
  std::string csv;         // ingestion schema of the matching model
  std::string latent_csv;  // true latent values per unit, when the DGP has them
  std::size_t rows = 0;    // data rows in `csv`
};

/// neighborhood, fixed_effects, skew_normal, binary_choice, ordered_choice,
/// censored, perm_transitory, linear_regression.
const std::vector<std::string>& dgp_keys();
SimulatedData simulate_dgp(const std::string& key, ParamMap& params, std::size_t n, std::uint64_t seed);

// ------------------------------------------------------------- estimation

/// fixed_effects, censored, binary_choice, ordered_choice, perm_transitory, linear_regression.
const std::vector<std::string>& model_keys();

/// Fitted reference model, data and target, ready for the estimators.
///   fixed_effects      panel CSV (unit_id, j, y); targets cdf:<a>, mean
///   linear_regression  CSV (y, x1..xd); targets error_cdf:<a>, mean_error
///   binary_choice      CSV (y, x1..xd); target asf:<x1>[;<x2>...]
///   ordered_choice     CSV (y, x1); target asf:<x>; needs param thresholds
///   censored           CSV (y, x1..xd); target mean
///   perm_transitory    panel CSV (unit_id, t, y); target cdf:<eta|eps>:<t>:<a> (t from 1)
struct PreparedModel {
  ModelPtr model;
  Sample data;
  Target target;
  std::map<std::string, double> parameters;
  std::optional<double> fe_estimate;  // fixed-effects plug-in, where defined
  std::optional<double> pm_estimate;  // plug-in of posterior means, where defined
  std::vector<std::string> notes;
};
PreparedModel prepare_model(const std::string& key, const std::string& data_path, const std::string& target,
                            ParamMap& params);

struct EstimateRequest {
  std::string model;
  std::string data_path;
  std::string target;
  std::vector<double> epsilons{0.0};
  DivergenceSpec divergence;
  std::size_t draws = 20000;
  std::uint64_t seed = 0;
  ParamMap params;
};

struct IntervalRow {
  double epsilon = 0.0, lower = 0.0, upper = 0.0, half_width = 0.0;
};

struct EstimateReport {
  std::string model, target;
  std::size_t n = 0;
  std::map<std::string, double> parameters;
  double model_based = 0.0, posterior = 0.0;
  std::optional<double> fe_estimate, pm_estimate;
  double sigma_mm = 0.0, sigma_mp = 0.0, sigma_pp = 0.0;
  double r2 = 0.0, r2_se = 0.0, bias_ratio = 0.0;
  double slope_posterior = 0.0, slope_model = 0.0;
  double spec_statistic = 0.0, spec_p_value = 1.0;
  std::vector<IntervalRow> intervals;
  std::vector<std::string> warnings;

  std::string to_json() const;
  std::string to_csv() const;
};

EstimateReport run_estimate(EstimateRequest& request);

/// Local worst-case bias expansions of the posterior and model-based
/// estimators on the epsilon grid, as JSON or CSV.
std::string run_bias(EstimateRequest& request, bool json);

/// Finite-support oracle: worst-case biases (both solvers), global ratios and
/// the Dirichlet limit for one instance (JSON file, or random from the seed).
std::string run_oracle(const std::string& instance_path, const std::vector<double>& epsilons,
                       const DivergenceSpec& div, std::uint64_t seed, bool json);

}  // namespace robpost::exp
