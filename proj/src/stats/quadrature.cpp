#include "robpost/stats/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>

#include "robpost/error.hpp"

namespace robpost::stats {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights come
// from the first component of each eigenvector.
QuadratureRule golub_welsch(int n, double (*offdiag)(int), double mass) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int k = 1; k < n; ++k) sub(k - 1) = offdiag(k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericalError("quadrature: eigen decomposition failed");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    rule.nodes[k] = solver.eigenvalues()(k);
    const double v = solver.eigenvectors()(0, k);
    rule.weights[k] = mass * v * v;
  }
  return rule;
}

double hermite_offdiag(int k) { return std::sqrt(static_cast<double>(k)); }
double legendre_offdiag(int k) { return k / std::sqrt(4.0 * k * k - 1.0); }

const QuadratureRule& cached(std::map<int, QuadratureRule>& cache, std::mutex& mu, int n, double (*offdiag)(int),
                             double mass) {
  require(n >= 2, "quadrature: need at least two nodes");
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, golub_welsch(n, offdiag, mass)).first;
  return it->second;
}

}  // namespace

const QuadratureRule& gauss_hermite(int n) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mu;
  return cached(cache, mu, n, hermite_offdiag, 1.0);
}

const QuadratureRule& gauss_legendre(int n) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mu;
  return cached(cache, mu, n, legendre_offdiag, 2.0);
}

}  // namespace robpost::stats
