#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "robpost/stats/rng.hpp"

namespace robpost::stats {

struct Normal {
  double mean = 0.0;
  double sd = 1.0;
};

/// exp(N(meanlog, sdlog)).
struct LogNormal {
  double meanlog = 0.0;
  double sdlog = 1.0;
};

/// Azzalini skew-normal: location + scale * (delta |Z0| + sqrt(1 - delta^2) Z1),
/// with shape given as delta in (-1, 1).
struct SkewNormal {
  double location = 0.0;
  double scale = 1.0;
  double delta = 0.0;
};

/// (chi2_df - df) / sqrt(2 df): mean zero, variance one.
struct Chi2Recentered {
  double df = 1.0;
};

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

struct Gamma {
  double shape = 1.0;
  double scale = 1.0;
};

using Distribution = std::variant<Normal, LogNormal, SkewNormal, Chi2Recentered, Uniform, Gamma>;

double draw_one(const Distribution& dist, RngStream& rng);
std::vector<double> draw(const Distribution& dist, RngStream& rng, std::size_t count);

/// Marsaglia-Tsang gamma variate.
double draw_gamma(double shape, RngStream& rng);
/// Dirichlet variate via normalized gammas.
std::vector<double> draw_dirichlet(const std::vector<double>& alpha, RngStream& rng);

double population_mean(const Distribution& dist);
double population_variance(const Distribution& dist);
double population_skewness(const Distribution& dist);

/// Skew-normal with mean zero and unit variance for a given delta.
SkewNormal standardized_skew_normal(double delta);
/// Delta whose skew-normal has the requested skewness (|skewness| < 0.9952).
double skew_normal_delta_for_skewness(double skewness);

/// Recentred log-normal with mean zero and the given variance; `sdlog` fixes the shape.
struct CenteredLogNormal {
  double variance = 1.0;
  double sdlog = 1.0;
  double sample(RngStream& rng) const;
  double density(double x) const;
};

}  // namespace robpost::stats
