#pragma once

#include <Eigen/Core>
#include <functional>

namespace robpost::stats {

struct NelderMeadOptions {
  double initial_step = 0.5;
  double tolerance = 1e-10;
  int max_evaluations = 20000;
};

struct MinimizeResult {
  Eigen::VectorXd argmin;
  double value = 0.0;
  int evaluations = 0;
};

MinimizeResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd start,
                           const NelderMeadOptions& options = {});

/// Golden-section search for the minimum of a unimodal function on [lo, hi].
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10);

/// Root of a continuous function with a sign change on [lo, hi].
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12, int max_iter = 300);

}  // namespace robpost::stats
