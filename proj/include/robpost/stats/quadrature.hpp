#pragma once

#include <vector>

namespace robpost::stats {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for E[f(Z)], Z ~ N(0,1) (probabilists' weight, weights sum to 1).
const QuadratureRule& gauss_hermite(int n);
/// Gauss-Legendre rule on [-1, 1] (weights sum to 2).
const QuadratureRule& gauss_legendre(int n);

/// E[f(mean + sd Z)] for Z ~ N(0,1).
template <class F>
double normal_expectation(F&& f, double mean, double sd, int nodes = 96) {
  const auto& rule = gauss_hermite(nodes);
  double acc = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) acc += rule.weights[k] * f(mean + sd * rule.nodes[k]);
  return acc;
}

/// Integral of f over [a, b] with `panels` composite Gauss-Legendre panels.
template <class F>
double integrate(F&& f, double a, double b, int panels = 16, int nodes = 20) {
  const auto& rule = gauss_legendre(nodes);
  const double width = (b - a) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) acc += rule.weights[k] * f(mid + 0.5 * width * rule.nodes[k]);
  }
  return 0.5 * width * acc;
}

}  // namespace robpost::stats
