#include "robpost/framework/models.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "robpost/error.hpp"
#include "robpost/stats/distributions.hpp"
#include "robpost/stats/normal.hpp"
#include "robpost/stats/quadrature.hpp"

namespace robpost {

namespace {

double log_normal_pdf(double x, double mean, double var) {
  const double z = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + z * z / var);
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double e : v) out(k++) = e;
  return out;
}

const FixedEffectsModel& as_fe(const ReferenceModel& model) {
  const auto* fe = dynamic_cast<const FixedEffectsModel*>(&model);
  if (!fe) throw ValidationError("target defined for the fixed_effects model used with '" + model.key() + "'");
  return *fe;
}

}  // namespace

// ---------------------------------------------------------------- fixed effects

FixedEffectsModel::FixedEffectsModel(fe::FeParams params, bool noise_known)
    : params_(params), noise_known_(noise_known) {
  params_.validate();
}

Vector FixedEffectsModel::parameters() const {
  if (noise_known_) return vec({params_.mu_alpha, params_.var_alpha});
  return vec({params_.mu_alpha, params_.var_alpha, params_.var_eps});
}

ModelPtr FixedEffectsModel::with_parameters(const Vector& theta) const {
  require(theta.size() == (noise_known_ ? 2 : 3), "fixed_effects: wrong parameter length");
  fe::FeParams p = params_;
  p.mu_alpha = theta(0);
  p.var_alpha = theta(1);
  if (!noise_known_) p.var_eps = theta(2);
  return std::make_shared<FixedEffectsModel>(p, noise_known_);
}

Vector FixedEffectsModel::draw_latent(const Vector&, stats::RngStream& rng) const {
  const double alpha = params_.mu_alpha + params_.sd_alpha() * rng.normal();
  const double noise = std::sqrt(params_.noise_var()) * rng.normal();
  if (!has_within()) return vec({alpha, noise});
  const double dof = params_.J - 1.0;
  const double w = params_.var_eps * 2.0 * stats::draw_gamma(0.5 * dof, rng) / dof;
  return vec({alpha, noise, w});
}

double FixedEffectsModel::log_density(const Vector& u, const Vector&) const {
  double lp = 0.0;
  if (params_.var_alpha > 0.0)
    lp += log_normal_pdf(u(0), params_.mu_alpha, params_.var_alpha);
  else if (u(0) != params_.mu_alpha)
    return -INFINITY;
  if (params_.noise_var() > 0.0)
    lp += log_normal_pdf(u(1), 0.0, params_.noise_var());
  else if (u(1) != 0.0)
    return -INFINITY;
  if (has_within() && params_.var_eps > 0.0) {
    const double k = params_.J - 1.0;
    const double scale = k / params_.var_eps;
    const double c = u(2) * scale;
    if (!(c > 0.0)) return -INFINITY;
    lp += (0.5 * k - 1.0) * std::log(c) - 0.5 * c - 0.5 * k * std::log(2.0) - std::lgamma(0.5 * k) + std::log(scale);
  }
  return lp;
}

Vector FixedEffectsModel::outcome(const Vector& u, const Vector&) const {
  if (!has_within()) return vec({u(0) + u(1)});
  return vec({u(0) + u(1), u(2)});
}

Vector FixedEffectsModel::moments(const Vector& y, const Vector&) const {
  const double c = y(0) - params_.mu_alpha;
  const double second = c * c - params_.var_alpha - params_.noise_var();
  if (!has_within()) return vec({c, second});
  return vec({c, second, y(1) - params_.var_eps});
}

Vector FixedEffectsModel::regression_features(const Vector& y, const Vector&) const { return vec({y(0)}); }

std::optional<double> FixedEffectsModel::posterior_expectation(const LatentMap& h, const Vector& y,
                                                               const Vector& x) const {
  require(y.size() == (has_within() ? 2 : 1), "fixed_effects: outcome has the wrong length");
  const double ybar = y(0);
  Vector u(has_within() ? 3 : 2);
  if (has_within()) u(2) = y(1);
  auto at = [&](double alpha) {
    u(0) = alpha;
    u(1) = ybar - alpha;
    return h(u, x);
  };
  const double sd = params_.posterior_sd();
  if (sd == 0.0) return at(params_.posterior_mean(ybar));
  return stats::normal_expectation(at, params_.posterior_mean(ybar), sd);
}

std::optional<double> FixedEffectsModel::prior_expectation(const LatentMap& h, const Vector& x) const {
  Vector u(has_within() ? 3 : 2);
  if (has_within()) u(2) = params_.var_eps;
  const double noise_sd = std::sqrt(params_.noise_var());
  return stats::normal_expectation(
      [&](double alpha) {
        u(0) = alpha;
        return stats::normal_expectation(
            [&](double e) {
              u(1) = e;
              return h(u, x);
            },
            0.0, noise_sd, 48);
      },
      params_.mu_alpha, params_.sd_alpha(), 48);
}

Vector FixedEffectsModel::influence(const Vector& y, const Vector&) const {
  const double c = y(0) - params_.mu_alpha;
  const double between = c * c - params_.var_alpha - params_.noise_var();
  if (noise_known_) return vec({c, between});
  require(has_within(), "fixed_effects: estimated noise variance needs J >= 2");
  const double within = y(1) - params_.var_eps;
  return vec({c, between - within / params_.J, within});
}

Sample fe_observations(const PanelData& panel) {
  const Eigen::VectorXd ybar = panel.unit_means();
  const auto J = panel.y.cols();
  Sample out;
  out.reserve(static_cast<std::size_t>(panel.y.rows()));
  for (Eigen::Index i = 0; i < panel.y.rows(); ++i) {
    Observation o;
    if (J >= 2)
      o.y = vec({ybar(i), (panel.y.row(i).array() - ybar(i)).square().sum() / (J - 1.0)});
    else
      o.y = vec({ybar(i)});
    o.x = Vector(0);
    out.push_back(std::move(o));
  }
  return out;
}

Target fe_indicator_target(double a) {
  Target t;
  t.name = "cdf(" + std::to_string(a) + ")";
  t.delta = [a](const ReferenceModel&, const Vector& u, const Vector&) { return u(0) <= a ? 1.0 : 0.0; };
  t.posterior_mean = [a](const ReferenceModel& m, const Vector& y, const Vector&) {
    const auto& p = as_fe(m).params();
    const double sd = p.posterior_sd();
    const double center = p.posterior_mean(y(0));
    if (sd == 0.0) return center <= a ? 1.0 : 0.0;
    return stats::normal_cdf((a - center) / sd);
  };
  t.model_mean = [a](const ReferenceModel& m, const Vector&) {
    const auto& p = as_fe(m).params();
    if (p.var_alpha == 0.0) return p.mu_alpha <= a ? 1.0 : 0.0;
    return stats::normal_cdf((a - p.mu_alpha) / p.sd_alpha());
  };
  return t;
}

Target fe_level_target() {
  Target t;
  t.name = "alpha";
  t.delta = [](const ReferenceModel&, const Vector& u, const Vector&) { return u(0); };
  t.posterior_mean = [](const ReferenceModel& m, const Vector& y, const Vector&) {
    return as_fe(m).params().posterior_mean(y(0));
  };
  t.model_mean = [](const ReferenceModel& m, const Vector&) { return as_fe(m).params().mu_alpha; };
  return t;
}

// ------------------------------------------------------------ linear regression

LinearRegressionModel::LinearRegressionModel(Eigen::VectorXd beta, double sigma2, Eigen::MatrixXd gram)
    : beta_(std::move(beta)), sigma2_(sigma2), gram_(std::move(gram)) {
  require(sigma2_ > 0.0, "linear_regression: error variance must be positive");
  require(gram_.size() == 0 || (gram_.rows() == beta_.size() && gram_.cols() == beta_.size()),
          "linear_regression: Gram matrix has the wrong size");
}

Vector LinearRegressionModel::parameters() const {
  Vector t(beta_.size() + 1);
  t << beta_, sigma2_;
  return t;
}

ModelPtr LinearRegressionModel::with_parameters(const Vector& theta) const {
  require(theta.size() == beta_.size() + 1, "linear_regression: wrong parameter length");
  return std::make_shared<LinearRegressionModel>(theta.head(beta_.size()), theta(beta_.size()), gram_);
}

Vector LinearRegressionModel::draw_latent(const Vector&, stats::RngStream& rng) const {
  return vec({std::sqrt(sigma2_) * rng.normal()});
}

double LinearRegressionModel::log_density(const Vector& u, const Vector&) const {
  return log_normal_pdf(u(0), 0.0, sigma2_);
}

Vector LinearRegressionModel::outcome(const Vector& u, const Vector& x) const { return vec({x.dot(beta_) + u(0)}); }

Vector LinearRegressionModel::moments(const Vector& y, const Vector& x) const {
  const double r = y(0) - x.dot(beta_);
  Vector m(x.size() + 1);
  m << r * x, r * r - sigma2_;
  return m;
}

std::optional<double> LinearRegressionModel::posterior_expectation(const LatentMap& h, const Vector& y,
                                                                   const Vector& x) const {
  return h(vec({y(0) - x.dot(beta_)}), x);
}

std::optional<double> LinearRegressionModel::prior_expectation(const LatentMap& h, const Vector& x) const {
  Vector u(1);
  return stats::normal_expectation(
      [&](double e) {
        u(0) = e;
        return h(u, x);
      },
      0.0, std::sqrt(sigma2_));
}

Vector LinearRegressionModel::influence(const Vector& y, const Vector& x) const {
  if (gram_.size() == 0) return Vector(0);
  const double r = y(0) - x.dot(beta_);
  Vector h(beta_.size() + 1);
  h << gram_.ldlt().solve(x * r), r * r - sigma2_;
  return h;
}

LinearRegressionModel fit_linear_regression(const Sample& data) {
  require(!data.empty(), "fit_linear_regression: empty sample");
  const auto k = data.front().x.size();
  require(k >= 1, "fit_linear_regression: no regressors");
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd X(n, k);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    require(data[i].x.size() == k && data[i].y.size() == 1, "fit_linear_regression: ragged sample");
    X.row(i) = data[i].x.transpose();
    y(i) = data[i].y(0);
  }
  const Eigen::MatrixXd gram = X.transpose() * X / static_cast<double>(n);
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < k) throw ValidationError("fit_linear_regression: regressors are collinear");
  const Eigen::VectorXd beta = qr.solve(y);
  const double sigma2 = (y - X * beta).squaredNorm() / static_cast<double>(n);
  return LinearRegressionModel(beta, sigma2, gram);
}

}  // namespace robpost
