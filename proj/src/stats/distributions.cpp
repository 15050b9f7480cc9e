#include "robpost/stats/distributions.hpp"

#include <cmath>
#include <numbers>

#include "robpost/error.hpp"
#include "robpost/stats/normal.hpp"

namespace robpost::stats {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate(const Distribution& dist) {
  std::visit(Overloaded{
                 [](const Normal& d) { require(d.sd > 0.0, "normal: sd must be positive"); },
                 [](const LogNormal& d) { require(d.sdlog > 0.0, "lognormal: sdlog must be positive"); },
                 [](const SkewNormal& d) {
                   require(d.scale > 0.0, "skew_normal: scale must be positive");
                   require(d.delta > -1.0 && d.delta < 1.0, "skew_normal: delta must lie in (-1, 1)");
                 },
                 [](const Chi2Recentered& d) { require(d.df >= 1.0, "chi2_recentered: df must be >= 1"); },
                 [](const Uniform& d) { require(d.hi > d.lo, "uniform: need lo < hi"); },
                 [](const Gamma& d) {
                   require(d.shape > 0.0 && d.scale > 0.0, "gamma: shape and scale must be positive");
                 },
             },
             dist);
}

double skew_normal_skewness(double delta) {
  const double b = delta * std::sqrt(2.0 / std::numbers::pi);
  return 0.5 * (4.0 - std::numbers::pi) * b * b * b / std::pow(1.0 - b * b, 1.5);
}

}  // namespace

double draw_gamma(double shape, RngStream& rng) {
  require(shape > 0.0, "gamma: shape must be positive");
  if (shape < 1.0) {
    const double g = draw_gamma(shape + 1.0, rng);
    return g * std::pow(rng.uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double draw_one(const Distribution& dist, RngStream& rng) {
  return std::visit(
      Overloaded{
          [&](const Normal& d) { return d.mean + d.sd * rng.normal(); },
          [&](const LogNormal& d) { return std::exp(d.meanlog + d.sdlog * rng.normal()); },
          [&](const SkewNormal& d) {
            const double z0 = std::fabs(rng.normal());
            const double z1 = rng.normal();
            return d.location + d.scale * (d.delta * z0 + std::sqrt(1.0 - d.delta * d.delta) * z1);
          },
          [&](const Chi2Recentered& d) {
            double x;
            if (d.df == 1.0) {
              const double z = rng.normal();
              x = z * z;
            } else {
              x = 2.0 * draw_gamma(0.5 * d.df, rng);
            }
            return (x - d.df) / std::sqrt(2.0 * d.df);
          },
          [&](const Uniform& d) { return d.lo + (d.hi - d.lo) * rng.uniform(); },
          [&](const Gamma& d) { return d.scale * draw_gamma(d.shape, rng); },
      },
      dist);
}

std::vector<double> draw(const Distribution& dist, RngStream& rng, std::size_t count) {
  validate(dist);
  std::vector<double> out(count);
  for (auto& v : out) v = draw_one(dist, rng);
  return out;
}

std::vector<double> draw_dirichlet(const std::vector<double>& alpha, RngStream& rng) {
  require(!alpha.empty(), "dirichlet: empty concentration vector");
  std::vector<double> out(alpha.size());
  double total = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    require(alpha[k] > 0.0, "dirichlet: concentrations must be positive");
    out[k] = draw_gamma(alpha[k], rng);
    total += out[k];
  }
  for (auto& v : out) v /= total;
  return out;
}

double population_mean(const Distribution& dist) {
  return std::visit(Overloaded{
                        [](const Normal& d) { return d.mean; },
                        [](const LogNormal& d) { return std::exp(d.meanlog + 0.5 * d.sdlog * d.sdlog); },
                        [](const SkewNormal& d) {
                          return d.location + d.scale * d.delta * std::sqrt(2.0 / std::numbers::pi);
                        },
                        [](const Chi2Recentered&) { return 0.0; },
                        [](const Uniform& d) { return 0.5 * (d.lo + d.hi); },
                        [](const Gamma& d) { return d.shape * d.scale; },
                    },
                    dist);
}

double population_variance(const Distribution& dist) {
  return std::visit(Overloaded{
                        [](const Normal& d) { return d.sd * d.sd; },
                        [](const LogNormal& d) {
                          const double s2 = d.sdlog * d.sdlog;
                          return std::expm1(s2) * std::exp(2.0 * d.meanlog + s2);
                        },
                        [](const SkewNormal& d) {
                          return d.scale * d.scale * (1.0 - 2.0 * d.delta * d.delta / std::numbers::pi);
                        },
                        [](const Chi2Recentered&) { return 1.0; },
                        [](const Uniform& d) { return (d.hi - d.lo) * (d.hi - d.lo) / 12.0; },
                        [](const Gamma& d) { return d.shape * d.scale * d.scale; },
                    },
                    dist);
}

double population_skewness(const Distribution& dist) {
  return std::visit(Overloaded{
                        [](const Normal&) { return 0.0; },
                        [](const LogNormal& d) {
                          const double e = std::exp(d.sdlog * d.sdlog);
                          return (e + 2.0) * std::sqrt(e - 1.0);
                        },
                        [](const SkewNormal& d) { return skew_normal_skewness(d.delta); },
                        [](const Chi2Recentered& d) { return std::sqrt(8.0 / d.df); },
                        [](const Uniform&) { return 0.0; },
                        [](const Gamma& d) { return 2.0 / std::sqrt(d.shape); },
                    },
                    dist);
}

SkewNormal standardized_skew_normal(double delta) {
  require(delta > -1.0 && delta < 1.0, "skew_normal: delta must lie in (-1, 1)");
  const double b = delta * std::sqrt(2.0 / std::numbers::pi);
  const double scale = 1.0 / std::sqrt(1.0 - b * b);
  return SkewNormal{-b * scale, scale, delta};
}

double skew_normal_delta_for_skewness(double skewness) {
  const double cap = skew_normal_skewness(1.0 - 1e-12);
  require(std::fabs(skewness) < cap, "skew_normal: skewness outside the attainable range");
  double lo = 0.0, hi = 1.0;
  const double target = std::fabs(skewness);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (skew_normal_skewness(mid) < target ? lo : hi) = mid;
  }
  const double delta = 0.5 * (lo + hi);
  return skewness < 0 ? -delta : delta;
}

double CenteredLogNormal::sample(RngStream& rng) const {
  const double s2 = sdlog * sdlog;
  const double c = std::sqrt(variance / (std::expm1(s2) * std::exp(s2)));
  return c * (std::exp(sdlog * rng.normal()) - std::exp(0.5 * s2));
}

double CenteredLogNormal::density(double x) const {
  const double s2 = sdlog * sdlog;
  const double c = std::sqrt(variance / (std::expm1(s2) * std::exp(s2)));
  const double v = x / c + std::exp(0.5 * s2);
  if (v <= 0.0) return 0.0;
  const double z = std::log(v) / sdlog;
  return normal_pdf(z) / (sdlog * v * c);
}

}  // namespace robpost::stats
