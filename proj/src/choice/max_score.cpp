#include "robpost/choice/max_score.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "robpost/error.hpp"

namespace robpost::choice {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// sum_i (2 y_i - 1) 1{b_0 + x_i'b >= 0}
double score(const VectorXd& sign, const MatrixXd& x, double b0, const VectorXd& b) {
  const VectorXd idx = (x * b).array() + b0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < idx.size(); ++i)
    if (idx(i) >= 0.0) s += sign(i);
  return s;
}

struct Run {
  int start = 0;
  int length = 0;
};

// First longest run of maximal values; circular when `wrap` is set.
Run best_run(const std::vector<double>& values, bool wrap) {
  const int n = static_cast<int>(values.size());
  const double top = *std::max_element(values.begin(), values.end());
  auto is_top = [&](int k) { return values[static_cast<std::size_t>(((k % n) + n) % n)] >= top; };
  if (wrap && std::all_of(values.begin(), values.end(), [&](double v) { return v >= top; })) return {0, n};
  int first = 0;
  if (wrap) {
    // Start scanning just after a non-maximal point so runs are not split.
    while (is_top(first)) ++first;
    ++first;
  }
  Run best{0, 0};
  for (int k = first; k < first + n;) {
    if (!is_top(k)) {
      ++k;
      continue;
    }
    int len = 0;
    while (len < n && k + len < first + n && is_top(k + len)) ++len;
    const int start = ((k % n) + n) % n;
    if (len > best.length || (len == best.length && start < best.start)) best = {start, len};
    k += len;
  }
  return best;
}

}  // namespace

VectorXd max_score(const std::vector<double>& y, const MatrixXd& x, const MaxScoreOptions& options) {
  const auto n = static_cast<Eigen::Index>(y.size());
  require(n >= 1 && x.rows() == n, "max_score: outcome and covariate rows differ");
  const auto d = x.cols();
  require(d >= 1 && d <= 2, "max_score: between one and two regressors are supported");
  require(options.resolution >= 3, "max_score: grid resolution must be at least 3");
  require(x.allFinite(), "max_score: non-finite covariates");
  VectorXd sign(n);
  bool any1 = false, any0 = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    require(y[static_cast<std::size_t>(i)] == 0.0 || y[static_cast<std::size_t>(i)] == 1.0,
            "max_score: outcomes must be 0 or 1");
    sign(i) = 2.0 * y[static_cast<std::size_t>(i)] - 1.0;
    (y[static_cast<std::size_t>(i)] == 1.0 ? any1 : any0) = true;
  }
  if (!(any0 && any1)) throw IdentificationError("max_score: outcome has no variation");
  const int R = options.resolution;
  VectorXd out(1 + d);

  if (options.normalization == Normalization::unit_norm) {
    constexpr double pi = std::numbers::pi;
    if (d == 1) {
      // R points on [-pi, pi]; the last repeats the first.
      const int m = R - 1;
      const double step = 2.0 * pi / m;
      std::vector<double> values(static_cast<std::size_t>(m));
      VectorXd b(1);
      for (int k = 0; k < m; ++k) {
        const double th = -pi + step * k;
        b(0) = std::cos(th);
        values[static_cast<std::size_t>(k)] = score(sign, x, std::sin(th), b);
      }
      const Run run = best_run(values, true);
      const double th = -pi + step * (run.start + 0.5 * (run.length - 1));
      out << std::sin(th), std::cos(th);
      return out;
    }
    double best = -INFINITY;
    VectorXd b(2);
    for (int i = 0; i < R; ++i) {
      const double th = pi * i / (R - 1);
      for (int j = 0; j < R - 1; ++j) {
        const double ph = -pi + 2.0 * pi * j / (R - 1);
        b << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph);
        const double v = score(sign, x, std::cos(th), b);
        if (v > best) {
          best = v;
          out << std::cos(th), b;
        }
      }
    }
    return out;
  }

  // First slope fixed at 1.
  if (d == 1) {
    const double lo = -x.col(0).maxCoeff(), hi = -x.col(0).minCoeff();
    const double pad = 0.01 * (hi - lo) + 1e-9;
    const double a = lo - pad, step = (hi - lo + 2.0 * pad) / (R - 1);
    std::vector<double> values(static_cast<std::size_t>(R));
    const VectorXd one = VectorXd::Ones(1);
    for (int k = 0; k < R; ++k) values[static_cast<std::size_t>(k)] = score(sign, x, a + step * k, one);
    const Run run = best_run(values, false);
    if (run.start == 0 || run.start + run.length >= R)
      throw IdentificationError("max_score: maximizer lies outside the covariate support");
    out << a + step * (run.start + 0.5 * (run.length - 1)), 1.0;
    return out;
  }
  const double bound = x.col(0).cwiseAbs().maxCoeff() + options.slope_range * x.col(1).cwiseAbs().maxCoeff();
  double best = -INFINITY;
  VectorXd b(2);
  for (int j = 0; j < R; ++j) {
    b << 1.0, -options.slope_range + 2.0 * options.slope_range * j / (R - 1);
    for (int k = 0; k < R; ++k) {
      const double c = -bound + 2.0 * bound * k / (R - 1);
      const double v = score(sign, x, c, b);
      if (v > best) {
        best = v;
        out << c, b;
      }
    }
  }
  return out;
}

OrderedScoreFit ordered_max_score(const std::vector<double>& y, const MatrixXd& x, const std::vector<double>& thresholds,
                                  const MaxScoreOptions& options) {
  require(x.cols() == 1, "ordered_max_score: one regressor expected");
  MaxScoreOptions opt = options;
  opt.normalization = Normalization::first_slope;
  OrderedScoreFit fit;
  std::vector<double> binary(y.size());
  for (std::size_t j = 1; j <= thresholds.size(); ++j) {
    for (std::size_t i = 0; i < y.size(); ++i) binary[i] = y[i] > static_cast<double>(j) + 0.5 ? 1.0 : 0.0;
    try {
      const VectorXd b = max_score(binary, x, opt);
      fit.intercepts.push_back(b(0));
      fit.used_thresholds.push_back(thresholds[j - 1]);
    } catch (const IdentificationError&) {
      fit.warnings.push_back("ordered_max_score: threshold " + std::to_string(j) + " not identified; skipped");
    }
  }
  if (fit.intercepts.size() < 2) throw IdentificationError("ordered_max_score: fewer than two usable thresholds");
  const auto m = static_cast<Eigen::Index>(fit.intercepts.size());
  MatrixXd design(m, 2);
  VectorXd c(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    design(j, 0) = 1.0;
    design(j, 1) = fit.used_thresholds[static_cast<std::size_t>(j)];
    c(j) = fit.intercepts[static_cast<std::size_t>(j)];
  }
  const VectorXd coef = design.colPivHouseholderQr().solve(c);
  // c_j = (beta_0 - mu_j) / beta_1.
  if (!(std::abs(coef(1)) > 1e-12)) throw IdentificationError("ordered_max_score: intercepts do not vary with thresholds");
  const double slope = -1.0 / coef(1);
  fit.beta = VectorXd(2);
  fit.beta << coef(0) * slope, slope;
  return fit;
}

}  // namespace robpost::choice
