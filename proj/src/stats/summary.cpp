#include "robpost/stats/summary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "robpost/error.hpp"

namespace robpost::stats {

double mean(std::span<const double> x) {
  require(!x.empty(), "mean: empty input");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  require(x.size() >= 2, "sample_variance: need at least two values");
  return variance(x) * static_cast<double>(x.size()) / static_cast<double>(x.size() - 1);
}

double covariance(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "covariance: size mismatch");
  const double mx = mean(x), my = mean(y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
  return s / static_cast<double>(x.size());
}

double correlation(std::span<const double> x, std::span<const double> y) {
  return covariance(x, y) / std::sqrt(variance(x) * variance(y));
}

double skewness(std::span<const double> x) {
  const double m = mean(x);
  double m2 = 0.0, m3 = 0.0;
  for (double v : x) {
    const double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= static_cast<double>(x.size());
  m3 /= static_cast<double>(x.size());
  return m3 / std::pow(m2, 1.5);
}

double weighted_mean(std::span<const double> x, std::span<const double> w) {
  require(x.size() == w.size() && !x.empty(), "weighted_mean: size mismatch or empty input");
  double sw = 0.0, s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(w[i] >= 0.0, "weighted_mean: negative weight");
    sw += w[i];
    s += w[i] * x[i];
  }
  require(sw > 0.0, "weighted_mean: weights sum to zero");
  return s / sw;
}

double weighted_variance(std::span<const double> x, std::span<const double> w) {
  const double m = weighted_mean(x, w);
  double sw = 0.0, s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    s += w[i] * (x[i] - m) * (x[i] - m);
  }
  return s / sw;
}

double weighted_quantile(std::span<const double> x, std::span<const double> w, double p) {
  require(x.size() == w.size() && !x.empty(), "weighted_quantile: size mismatch or empty input");
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  require(total > 0.0, "weighted_quantile: weights sum to zero");
  double cum = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    cum += w[idx[k]];
    if (cum >= p * total * (1.0 - 1e-12)) return x[idx[k]];
  }
  return x[idx.back()];
}

double effective_size(std::span<const double> w) {
  double s = 0.0, s2 = 0.0;
  for (double v : w) {
    s += v;
    s2 += v * v;
  }
  require(s2 > 0.0, "effective_size: all weights zero");
  return s * s / s2;
}

double quantile(std::vector<double> x, double p) {
  require(!x.empty(), "quantile: empty input");
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

}  // namespace robpost::stats
