#include "robpost/fixed_effects/estimators.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "robpost/error.hpp"
#include "robpost/stats/normal.hpp"
#include "robpost/stats/quadrature.hpp"

namespace robpost::fe {

using stats::normal_cdf;

namespace {

void check_means(const Eigen::VectorXd& ybar) { require(ybar.size() >= 1, "fixed effects: no units"); }

}  // namespace

double cdf_fe(const Eigen::VectorXd& ybar, double a) {
  check_means(ybar);
  return static_cast<double>((ybar.array() <= a).count()) / static_cast<double>(ybar.size());
}

Eigen::VectorXd empirical_bayes_means(const Eigen::VectorXd& ybar, const FeParams& params) {
  params.validate();
  const double rho = params.shrinkage();
  return (params.mu_alpha + rho * (ybar.array() - params.mu_alpha)).matrix();
}

double cdf_pm(const Eigen::VectorXd& ybar, const FeParams& params, double a) {
  check_means(ybar);
  return cdf_fe(empirical_bayes_means(ybar, params), a);
}

double cdf_posterior(const Eigen::VectorXd& ybar, const FeParams& params, double a) {
  check_means(ybar);
  params.validate();
  const double rho = params.shrinkage();
  const double s = params.posterior_sd();
  if (rho >= 1.0 || !(s > 0.0)) return cdf_pm(ybar, params, a);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < ybar.size(); ++i)
    acc += normal_cdf((a - params.mu_alpha - rho * (ybar(i) - params.mu_alpha)) / s);
  return acc / static_cast<double>(ybar.size());
}

double cdf_model(const FeParams& params, double a) {
  params.validate();
  if (!(params.var_alpha > 0.0)) throw ValidationError("cdf_model: zero variance of alpha");
  return normal_cdf((a - params.mu_alpha) / params.sd_alpha());
}

Moments posterior_moments(const Eigen::VectorXd& ybar, const FeParams& params) {
  const Eigen::VectorXd eb = empirical_bayes_means(ybar, params);
  const double m = eb.mean();
  const double s2 = params.var_alpha * (1.0 - params.shrinkage());
  return {m, s2 + (eb.array() - m).square().mean()};
}

Projection project_on_covariates(const Eigen::VectorXd& ybar, const FeParams& params, const Eigen::MatrixXd& W,
                                 ProjectionMode mode) {
  require(W.rows() == ybar.size(), "project_on_covariates: W must have one row per unit");
  require(W.cols() >= 1, "project_on_covariates: empty covariate matrix");
  const Eigen::MatrixXd gram = W.transpose() * W;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(cond < 1e12)) {
    std::ostringstream msg;
    msg << "project_on_covariates: covariate matrix is rank deficient (Gram condition number " << cond << ")";
    throw ValidationError(msg.str());
  }
  const Eigen::VectorXd target = mode == ProjectionMode::posterior ? empirical_bayes_means(ybar, params) : ybar;
  return {gram.ldlt().solve(W.transpose() * target), cond};
}

double skewness_posterior(const Eigen::VectorXd& ybar, const FeParams& params) {
  params.validate();
  if (!(params.var_alpha > 0.0)) throw ValidationError("skewness_posterior: zero variance of alpha");
  const double rho = params.shrinkage();
  const double m3 = (ybar.array() - ybar.mean()).cube().mean();
  return rho * rho * rho * m3 / std::pow(params.sd_alpha(), 3);
}

double gini_model(const FeParams& params) {
  params.validate();
  if (!(params.var_alpha > 0.0)) throw ValidationError("gini_model: zero variance of alpha");
  return 2.0 * normal_cdf(params.sd_alpha() / std::sqrt(2.0)) - 1.0;
}

double gini_gradient(const FeParams& params, double alpha) {
  const double s = params.sd_alpha();
  const double g = gini_model(params);
  const double z = (alpha - params.mu_alpha) / s;
  return -std::exp(alpha - params.mu_alpha - 0.5 * s * s) * (g + 1.0 - 2.0 * normal_cdf(z)) +
         (1.0 - 2.0 * normal_cdf(z - s));
}

GiniResult gini_posterior(const Eigen::VectorXd& ybar, const FeParams& params, int nodes) {
  require(nodes >= 64, "gini_posterior: use at least 64 quadrature nodes");
  check_means(ybar);
  const double g_model = gini_model(params);
  const auto grad = [&](double a) { return gini_gradient(params, a); };
  const double post_sd = params.posterior_sd();
  auto correction = [&](int q) {
    const double prior_term = stats::normal_expectation(grad, params.mu_alpha, params.sd_alpha(), q);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < ybar.size(); ++i)
      acc += post_sd > 0.0 ? stats::normal_expectation(grad, params.posterior_mean(ybar(i)), post_sd, q)
                           : grad(params.posterior_mean(ybar(i)));
    return acc / static_cast<double>(ybar.size()) - prior_term;
  };
  GiniResult res;
  res.correction = correction(nodes);
  if (std::fabs(correction(2 * nodes) - res.correction) > 1e-6)
    res.warnings.push_back("gini_posterior: quadrature not converged (doubling nodes moved the result by > 1e-6)");
  res.value = g_model + res.correction;
  return res;
}

}  // namespace robpost::fe
