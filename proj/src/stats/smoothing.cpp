#include "robpost/stats/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "robpost/error.hpp"
#include "robpost/stats/normal.hpp"
#include "robpost/stats/summary.hpp"

namespace robpost::stats {

namespace {

constexpr double kWindow = 8.0;
constexpr int kMaxWidenings = 5;

double resolve_bandwidth(const KernelSpec& spec, std::span<const double> x, std::span<const double> w) {
  if (const double* h = std::get_if<double>(&spec.bandwidth)) {
    require(*h > 0.0, "kernel bandwidth must be positive");
    return *h;
  }
  return silverman_bandwidth(x, w);
}

}  // namespace

double silverman_bandwidth(std::span<const double> x, std::span<const double> w) {
  std::vector<double> ones;
  if (w.empty()) {
    ones.assign(x.size(), 1.0);
    w = ones;
  }
  const double sd = std::sqrt(weighted_variance(x, w));
  const double iqr = weighted_quantile(x, w, 0.75) - weighted_quantile(x, w, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) throw ValidationError("bandwidth: degenerate sample (all points identical)");
  return 0.9 * spread * std::pow(effective_size(w), -0.2);
}

std::vector<double> kde(std::span<const double> points, std::span<const double> weights, const KernelSpec& spec,
                        std::span<const double> grid) {
  require(!points.empty(), "kde: empty sample");
  require(weights.empty() || weights.size() == points.size(), "kde: weight length mismatch");
  const auto [mn, mx] = std::minmax_element(points.begin(), points.end());
  if (*mn == *mx && std::holds_alternative<BandwidthRule>(spec.bandwidth))
    throw ValidationError("kde: degenerate sample (all points identical)");
  std::vector<double> w(points.size(), 1.0);
  if (!weights.empty()) w.assign(weights.begin(), weights.end());
  double total = 0.0;
  for (double v : w) {
    require(v >= 0.0, "kde: negative weight");
    total += v;
  }
  require(total > 0.0, "kde: weights sum to zero");
  const double h = resolve_bandwidth(spec, points, w);
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) acc += w[i] * normal_pdf((grid[g] - points[i]) / h);
    out[g] = acc / (total * h);
  }
  return out;
}

NwRegressor::NwRegressor(Eigen::MatrixXd x, Eigen::VectorXd y, const KernelSpec& spec) {
  require(x.rows() >= 2 && x.rows() == y.size(), "nw_regress: need at least two observations of matching size");
  require(x.cols() >= 1, "nw_regress: need at least one predictor");
  std::vector<Eigen::Index> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return x(a, 0) < x(b, 0); });
  x_.resize(x.rows(), x.cols());
  y_.resize(y.size());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    x_.row(r) = x.row(order[r]);
    y_(r) = y(order[r]);
  }
  global_mean_ = y_.mean();
  lo_ = x_.colwise().minCoeff();
  hi_ = x_.colwise().maxCoeff();
  h_.resize(x_.cols());
  for (Eigen::Index c = 0; c < x_.cols(); ++c) {
    if (const double* h = std::get_if<double>(&spec.bandwidth)) {
      require(*h > 0.0, "kernel bandwidth must be positive");
      h_(c) = *h;
    } else {
      Eigen::VectorXd col = x_.col(c);
      std::span<const double> s(col.data(), static_cast<std::size_t>(col.size()));
      const double h1 = silverman_bandwidth(s, {});
      // Silverman's rate generalised to d predictors
      const double d = static_cast<double>(x_.cols());
      h_(c) = h1 * std::pow(static_cast<double>(x_.rows()), 0.2 - 1.0 / (d + 4.0));
    }
  }
}

double NwRegressor::evaluate(const Eigen::VectorXd& query, bool* widened) const {
  require(query.size() == x_.cols(), "nw_regress: query dimension mismatch");
  const double* first = x_.col(0).data();
  const Eigen::Index n = x_.rows();
  double scale = 1.0;
  for (int attempt = 0; attempt <= kMaxWidenings; ++attempt, scale *= 2.0) {
    const double reach = kWindow * scale * h_(0);
    const Eigen::Index begin = std::lower_bound(first, first + n, query(0) - reach) - first;
    const Eigen::Index end = std::upper_bound(first, first + n, query(0) + reach) - first;
    if (begin >= end) continue;
    const double ref = y_(begin);
    double sw = 0.0, sy = 0.0;
    for (Eigen::Index r = begin; r < end; ++r) {
      double e = 0.0;
      for (Eigen::Index c = 0; c < x_.cols(); ++c) {
        const double z = (x_(r, c) - query(c)) / (scale * h_(c));
        e += z * z;
      }
      const double w = std::exp(-0.5 * e);
      sw += w;
      sy += w * (y_(r) - ref);
    }
    if (sw > 1e-280) {
      if (widened) *widened = attempt > 0;
      return ref + sy / sw;
    }
  }
  if (widened) *widened = true;
  return global_mean_;
}

double NwRegressor::operator()(const Eigen::VectorXd& query) const { return evaluate(query, nullptr); }

bool NwRegressor::extrapolated(const Eigen::VectorXd& query) const {
  for (Eigen::Index c = 0; c < x_.cols(); ++c)
    if (query(c) < lo_(c) || query(c) > hi_(c)) return true;
  bool widened = false;
  evaluate(query, &widened);
  return widened;
}

double nw_regress(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const KernelSpec& spec,
                  const Eigen::VectorXd& query) {
  return NwRegressor(x, y, spec)(query);
}

}  // namespace robpost::stats
