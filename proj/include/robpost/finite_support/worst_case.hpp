#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "robpost/finite_support/instance.hpp"
#include "robpost/robustness/divergence.hpp"

namespace robpost::fs {

enum class Solver { dual_tilting, primal_barrier };

/// sup of sum_k c_k f_k over f >= 0 with sum f = 1, sum psi_k f_k = 0 and
/// sum_k w_k phi(f_k / w_k) <= epsilon.
struct WorstCaseExpectation {
  double value = 0.0;
  Eigen::VectorXd weights;  // maximizing f
  double multiplier_mass = 0.0;        // tilt intercept
  double multiplier_divergence = 0.0;  // tilt slope on c; infinite when the divergence bound is slack
  Eigen::VectorXd multiplier_moments;
  bool divergence_slack = false;
  Solver solver = Solver::dual_tilting;
};

WorstCaseExpectation worst_case_expectation(const Eigen::VectorXd& c, const Eigen::VectorXd& ref_weights,
                                            const Eigen::MatrixXd& psi, const DivergenceSpec& div, double epsilon,
                                            Solver solver = Solver::dual_tilting);

struct WorstCaseSolution {
  double bias = 0.0;
  double upper = 0.0;  // sup of E_f[gamma - delta]
  double lower = 0.0;  // inf of E_f[gamma - delta]
  Eigen::VectorXd f0_upper, f0_lower;
  WorstCaseExpectation upper_detail, lower_detail;
  Solver solver = Solver::dual_tilting;
};

/// Worst-case bias of the estimator with class values `gamma`.
WorstCaseSolution worst_case_bias(const DiscreteInstance& inst, const Eigen::VectorXd& gamma, const DivergenceSpec& div,
                                  double epsilon, Solver solver = Solver::dual_tilting);

/// Worst-case mean squared prediction error sup E_f[(delta - gamma)^2].
WorstCaseExpectation worst_case_mse(const DiscreteInstance& inst, const Eigen::VectorXd& gamma,
                                    const DivergenceSpec& div, double epsilon, Solver solver = Solver::dual_tilting);

/// Runs both solvers and throws NumericalError if the biases differ by more than `tolerance`.
WorstCaseSolution worst_case_bias_checked(const DiscreteInstance& inst, const Eigen::VectorXd& gamma,
                                          const DivergenceSpec& div, double epsilon, double tolerance = 1e-5);

/// Analytic sqrt(eps) coefficient of the local bias expansion for class values gamma.
double local_slope(const DiscreteInstance& inst, const Eigen::VectorXd& gamma, const DivergenceSpec& div);

struct CandidateFit {
  double intercept = 0.0;  // leading term
  double slope = 0.0;      // sqrt(eps) coefficient
  double curvature = 0.0;  // eps coefficient
  double r2 = 0.0;
  double analytic_slope = 0.0;
};

struct Theorem1Report {
  std::vector<CandidateFit> fits;  // fits[0] is the posterior mean
  bool posterior_minimal = false;
  double max_slope_gap = 0.0;     // max over candidates of slope(P) - slope(candidate)
  double posterior_slope_rel_error = 0.0;  // |fitted - analytic| / analytic for the posterior mean
};

/// Fits b_eps = c0 + c1 sqrt(eps) + c2 eps on `epsilons` for the posterior
/// mean and each candidate. Throws NumericalError if a fit has R^2 < 0.999.
Theorem1Report verify_theorem1(const DiscreteInstance& inst, const DivergenceSpec& div,
                               const std::vector<double>& epsilons, const std::vector<Eigen::VectorXd>& candidates,
                               double tolerance = 1e-4);

struct RatioReport {
  double posterior = 0.0;
  double infimum = 0.0;
  double ratio = 1.0;
  Eigen::VectorXd argmin;
};

/// Worst-case bias of the posterior mean against the infimum over all class
/// value vectors (Nelder-Mead, 20 starts).
RatioReport verify_theorem2(const DiscreteInstance& inst, const DivergenceSpec& div, double epsilon,
                            std::uint64_t seed = 0);
/// Same with the worst-case mean squared prediction error.
RatioReport verify_theorem3(const DiscreteInstance& inst, const DivergenceSpec& div, double epsilon,
                            std::uint64_t seed = 0);

}  // namespace robpost::fs
