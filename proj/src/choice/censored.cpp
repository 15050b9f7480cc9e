#include "robpost/choice/censored.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "robpost/error.hpp"
#include "robpost/stats/normal.hpp"
#include "robpost/stats/optimize.hpp"
#include "robpost/stats/quadrature.hpp"

namespace robpost::choice {

namespace {

Eigen::VectorXd row(const ChoiceData& data, std::size_t i) {
  return data.x.row(static_cast<Eigen::Index>(i)).transpose();
}

// log Phi(z), accurate for very negative z.
double log_cdf(double z) {
  if (z > -30.0) return std::log(stats::normal_cdf(z));
  return -0.5 * z * z - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log1p(-1.0 / (z * z));
}

double tobit_loglik(const ChoiceData& data, const Eigen::VectorXd& beta, double sigma) {
  double ll = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double m = beta(0) + row(data, i).dot(beta.tail(beta.size() - 1));
    if (data.y[i] > 0.0) {
      const double z = (data.y[i] - m) / sigma;
      ll += -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
    } else {
      ll += log_cdf(-m / sigma);
    }
  }
  return ll;
}

void check_censored(const ChoiceData& data) {
  data.validate();
  for (double v : data.y) require(v >= 0.0, "censored data: outcomes must be non-negative (censoring at 0)");
}

}  // namespace

double censored_cell_expectation(const OutcomeFunction& h, double mean, double sd) {
  require(std::isfinite(mean), "censored_cell_expectation: non-finite mean");
  return truncated_normal_expectation([&](double u) { return h(mean + u); }, sd, -INFINITY, -mean);
}

double censored_cell_mean(double mean, double sd) {
  require(sd > 0.0, "censored_cell_mean: sd must be positive");
  return mean - sd * stats::inverse_mills(-mean / sd);
}

Estimate censored_posterior(const ChoiceModelSpec& spec, const ChoiceData& data, const OutcomeFunction& h) {
  spec.validate();
  check_censored(data);
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.y[i] > 0.0)
      sum += h(data.y[i]);
    else
      sum += censored_cell_expectation(h, spec.index(row(data, i)), spec.sigma);
  }
  Estimate out;
  out.value = sum / static_cast<double>(data.size());
  return out;
}

Estimate censored_model_estimate(const ChoiceModelSpec& spec, const ChoiceData& data, const OutcomeFunction& h) {
  spec.validate();
  data.validate();
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    sum += stats::normal_expectation(h, spec.index(row(data, i)), spec.sigma);
  Estimate out;
  out.value = sum / static_cast<double>(data.size());
  return out;
}

Eigen::VectorXd tobit_score(const ChoiceModelSpec& spec, double y, const Eigen::VectorXd& x) {
  spec.validate();
  require(y >= 0.0, "tobit_score: outcomes must be non-negative");
  const auto k = spec.beta.size();
  Eigen::VectorXd design(k);
  design << 1.0, x;
  const double m = spec.index(x), s = spec.sigma;
  Eigen::VectorXd g(k + 1);
  if (y > 0.0) {
    const double z = (y - m) / s;
    g.head(k) = (z / s) * design;
    g(k) = (z * z - 1.0) / s;
  } else {
    const double lam = stats::inverse_mills(-m / s);
    g.head(k) = (-lam / s) * design;
    g(k) = lam * m / (s * s);
  }
  return g;
}

TobitFit fit_tobit(const ChoiceData& data) {
  check_censored(data);
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto d = data.x.cols();
  Eigen::MatrixXd design(n, d + 1);
  design << Eigen::VectorXd::Ones(n), data.x;
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(data.y.data(), n);
  bool any_positive = false;
  for (double v : data.y) any_positive = any_positive || v > 0.0;
  if (!any_positive) throw IdentificationError("fit_tobit: every observation is censored");

  const Eigen::VectorXd ols = design.colPivHouseholderQr().solve(y);
  const double resid_sd = std::max(std::sqrt((y - design * ols).squaredNorm() / static_cast<double>(n)), 1e-3);
  Eigen::VectorXd start(d + 2);
  start << ols, std::log(resid_sd);
  auto objective = [&](const Eigen::VectorXd& th) {
    const double ll = tobit_loglik(data, th.head(d + 1), std::exp(th(d + 1)));
    return std::isfinite(ll) ? -ll / static_cast<double>(n) : 1e300;
  };
  stats::NelderMeadOptions opt;
  opt.initial_step = 0.25;
  opt.tolerance = 1e-12;
  auto res = stats::nelder_mead(objective, start, opt);
  opt.initial_step = 0.02;
  res = stats::nelder_mead(objective, res.argmin, opt);

  TobitFit fit;
  fit.spec.beta = res.argmin.head(d + 1);
  fit.spec.sigma = std::exp(res.argmin(d + 1));
  fit.log_likelihood = -res.value * static_cast<double>(n);
  fit.information = Eigen::MatrixXd::Zero(d + 2, d + 2);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Eigen::VectorXd g = tobit_score(fit.spec, data.y[i], row(data, i));
    fit.information += g * g.transpose();
  }
  fit.information /= static_cast<double>(n);
  return fit;
}

}  // namespace robpost::choice
