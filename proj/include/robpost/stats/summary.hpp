#pragma once

#include <span>
#include <vector>

namespace robpost::stats {

double mean(std::span<const double> x);
/// Variance with divisor n (population form).
double variance(std::span<const double> x);
double sample_variance(std::span<const double> x);
double covariance(std::span<const double> x, std::span<const double> y);
double correlation(std::span<const double> x, std::span<const double> y);
double skewness(std::span<const double> x);

double weighted_mean(std::span<const double> x, std::span<const double> w);
double weighted_variance(std::span<const double> x, std::span<const double> w);
/// Smallest x with weighted CDF >= p.
double weighted_quantile(std::span<const double> x, std::span<const double> w, double p);
/// (sum w)^2 / sum w^2.
double effective_size(std::span<const double> w);

/// Empirical quantile with linear interpolation (type 7).
double quantile(std::vector<double> x, double p);

}  // namespace robpost::stats
