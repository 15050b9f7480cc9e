#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "robpost/data/panel.hpp"
#include "robpost/fixed_effects/neighborhood.hpp"
#include "robpost/income/permanent_transitory.hpp"
#include "robpost/robustness/divergence.hpp"

namespace robpost::exp {

// Monte Carlo and numerical studies behind the reproduction tables. Every
// study takes a seed; replications draw from seed-derived streams indexed by
// replication, so results do not depend on `threads`.

// ---------------------------------------------------------------- neighborhoods

/// Variance split of noisy place effects used by the neighborhood calibration.
inline constexpr double kNeighborhoodVarTotal = 0.077;
inline constexpr double kNeighborhoodMeanNoise = 0.047;

/// Informativeness of the posterior for 1{alpha <= a} in the normal model with
/// one noisy measurement, over a = sd * z for z on a 161-point grid in [-4, 4];
/// summaries are weighted by the reference density of alpha.
struct R2Calibration {
  std::vector<double> a, weight, r2, r2_se;
  double weighted_mean = 0.0;
  double weighted_p95 = 0.0;
};
R2Calibration neighborhood_r2(double var_signal, double noise_var, std::size_t draws, std::uint64_t seed,
                              int grid_points = 161);

/// Log-normal place effects (zero mean, variance var_mu, log-scale sd `sdlog`)
/// observed with homoskedastic normal noise at several noise levels.
struct DensityScenario {
  double noise_fraction = 1.0;
  double design_shrinkage = 0.0;     // var_mu / (var_mu + noise)
  double estimated_shrinkage = 0.0;  // from the simulated effects
  double sup_distance = 0.0;         // max over the grid of |posterior density - true density|
  std::vector<double> posterior, prior;
};
struct DensityStudy {
  std::vector<double> grid, truth;
  std::vector<DensityScenario> scenarios;
};
DensityStudy neighborhood_density_study(std::size_t units, double var_mu, double noise_var, double sdlog,
                                        const std::vector<double>& noise_fractions, std::uint64_t seed);

/// Neighborhood figure on a summary data set: effect density, normal fit,
/// posterior density and prior density on a common grid.
struct NeighborhoodFigure {
  std::vector<double> grid, effect_density, normal_fit, posterior, prior;
  double var_total = 0.0, mean_noise = 0.0, var_signal = 0.0, shrinkage = 0.0;
  double var_posterior_means = 0.0;
  std::size_t trimmed = 0;
};
NeighborhoodFigure neighborhood_figure(const SummaryEffects& summary, const fe::NeighborhoodOptions& fit = {},
                                       int grid_points = 401);

/// Synthetic place effects matched to the variance split above (741 units,
/// normal effects, gamma noise variances with the calibrated mean).
SummaryEffects synthetic_neighborhoods(std::uint64_t seed, std::size_t units = 741);

// ------------------------------------------------------------ fixed effects

/// Posterior and model-based skewness and Gini estimates of a skew-normal
/// alpha (mean 0, variance 1) measured J times with standard normal noise.
struct SkewGiniPoint {
  int J = 0;
  double skew_posterior = 0.0, skew_posterior_sd = 0.0, skew_model = 0.0;
  double gini_posterior = 0.0, gini_posterior_sd = 0.0, gini_model = 0.0;
  double max_abs_skew_model = 0.0;  // over replications
};
struct SkewGiniStudy {
  double true_skewness = 0.0;
  double true_gini = 0.0;
  std::vector<SkewGiniPoint> points;
};
SkewGiniStudy skewness_gini_study(const std::vector<int>& J_values, std::size_t n, int reps, double skewness,
                                  std::uint64_t seed, unsigned threads);

/// Gini coefficient of exp(alpha) for the standardized skew-normal, by quadrature.
double skew_normal_gini(double skewness);

/// Closed-form posterior skewness against the generic simulated posterior
/// (kernel regression on simulated reference draws) on one data set; the
/// simulated route is repeated `replicates` times to get its Monte Carlo error.
/// `bandwidth` is the kernel bandwidth on standardized features; 0 selects
/// Silverman's rule, whose smoothing bias in the tails is visible here.
struct SkewnessRoutes {
  double closed_form = 0.0;
  double simulated = 0.0;
  double mc_se = 0.0;
};
SkewnessRoutes skewness_dual_route(std::size_t n, int J, double skewness, std::size_t draws, int replicates,
                                   std::uint64_t seed, double bandwidth = 0.0);

/// Size of the specification test for 1{alpha <= 0} under the normal model
/// (mean 0, var_alpha 1, var_eps 2).
struct SizeStudy {
  int reps = 0;
  int rejections = 0;
  double rate = 0.0;
  std::vector<double> p_values;
};
SizeStudy specification_test_size(std::size_t n, int J, int reps, std::size_t draws, std::uint64_t seed,
                                  unsigned threads);

// --------------------------------------------------------------- choice

/// Ordered choice with recentred chi-square(1) errors, one standard normal
/// regressor, beta = (0, 0.5), sigma = 1 and U(-2, 2) thresholds. beta is
/// estimated by grid maximum score, sigma by the ordered probit likelihood.
/// A replication whose design identifies fewer than two thresholds is redrawn.
struct OrderedAsfStudy {
  std::size_t categories = 0;
  std::vector<double> grid;
  std::vector<double> truth_mean, posterior_mean, model_mean;  // averaged over replications
  std::vector<double> mad_posterior, mad_model;                // per replication
  int posterior_wins = 0;
  int redraws = 0;  // designs redrawn because fewer than two thresholds were identified
  double mean_mad_posterior = 0.0, mean_mad_model = 0.0;
};
OrderedAsfStudy ordered_asf_study(std::size_t categories, std::size_t n, int reps, std::uint64_t seed,
                                  unsigned threads, int grid_points = 41);

/// Binary-choice tightness: closed-form ratio against the finite-support
/// solver at a large radius, for target indices `eta` and a zero data index.
struct BinaryRatioRow {
  double eta = 0.0;
  double closed_form = 0.0;        // posterior bias / model bias, closed form
  double solver_ratio = 0.0;       // same ratio from the finite-support solver
  double infimum_ratio = 0.0;      // posterior bias / inf over all estimators
};
std::vector<BinaryRatioRow> binary_ratio_curve(const std::vector<double>& eta);

// ----------------------------------------------------------- finite support

struct SweepRow {
  int instance = 0;
  double epsilon = 0.0;
  double bias_ratio = 0.0;
  double mse_ratio = 0.0;
  double solver_gap = 0.0;  // |dual - primal| worst-case bias of the posterior mean
};
struct TheoremSweep {
  std::vector<SweepRow> rows;
  double max_bias_ratio = 0.0, max_mse_ratio = 0.0, max_solver_gap = 0.0;
};
TheoremSweep theorem_sweep(int instances, const std::vector<double>& epsilons, const DivergenceSpec& div,
                           std::uint64_t seed, unsigned threads);

struct LocalOptimalityRow {
  int instance = 0;
  double posterior_slope = 0.0;
  double analytic_slope = 0.0;
  double min_candidate_slope = 0.0;
  double max_slope_gap = 0.0;
  double slope_rel_error = 0.0;
  bool posterior_minimal = false;
};
/// Instances come from the random generator; those whose posterior slope is
/// below 1e-3 are skipped (relative errors are meaningless there).
std::vector<LocalOptimalityRow> local_optimality_sweep(int instances, int candidates, const DivergenceSpec& div,
                                                       std::uint64_t seed);

/// Largest |Dirichlet posterior mean at `concentration` - posterior average|.
double dirichlet_limit_gap(int instances, double concentration, std::uint64_t seed);

// ------------------------------------------------------------------ income

struct IncomeCurves {
  std::vector<double> tau;
  income::QuantileCurve eta, eps;
  income::R2Curve r2_eta, r2_eps;
  income::PtParams params;
};
/// Minimum distance fit, quantile-difference curves and informativeness.
IncomeCurves income_curves(const PanelData& panel, const std::vector<double>& tau, std::size_t r2_draws,
                           std::uint64_t seed);

struct IncomeNull {
  double max_abs_eta = 0.0, max_abs_eps = 0.0;
};
/// Gaussian design at the survey-like calibration; parameters are re-estimated.
IncomeNull income_gaussian_null(std::size_t n, const std::vector<double>& tau, std::uint64_t seed);

struct IncomeSignature {
  double eta_low = 0.0, eta_high = 0.0, eps_low = 0.0, eps_high = 0.0;  // curve at tau = 0.1 and 0.9
};
IncomeSignature income_peakedness(std::size_t n, std::uint64_t seed);

/// Largest |E[eta_t | Y] + E[eps_t | Y] - Y_t| on a simulated panel.
double income_additive_gap(std::size_t n, std::uint64_t seed);

}  // namespace robpost::exp
