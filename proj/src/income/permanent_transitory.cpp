#include "robpost/income/permanent_transitory.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "json.hpp"
#include "robpost/error.hpp"
#include "robpost/framework/posterior.hpp"
#include "robpost/robustness/local.hpp"
#include "robpost/stats/normal.hpp"

namespace robpost::income {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ------------------------------------------------------------------ parameters

void PtParams::validate() const {
  const int T = periods();
  require(T >= 1, "pt params: at least one period is required");
  require(var_v.size() == T - 1, "pt params: var_v must have T - 1 entries");
  require(std::isfinite(var_eta1) && var_eta1 >= 0.0, "pt params: var_eta1 must be non-negative");
  for (Eigen::Index k = 0; k < var_v.size(); ++k)
    require(std::isfinite(var_v(k)) && var_v(k) >= 0.0, "pt params: var_v must be non-negative");
  for (Eigen::Index k = 0; k < var_eps.size(); ++k)
    require(std::isfinite(var_eps(k)) && var_eps(k) >= 0.0, "pt params: var_eps must be non-negative");
  const VectorXd h = eta_variances();
  for (int t = 0; t < T; ++t) require(h(t) + var_eps(t) > 0.0, "pt params: Var(Y_t) must be positive");
}

VectorXd PtParams::eta_variances() const {
  VectorXd h(periods());
  double acc = var_eta1;
  for (int t = 0; t < periods(); ++t) {
    if (t > 0) acc += var_v(t - 1);
    h(t) = acc;
  }
  return h;
}

MatrixXd PtParams::covariance() const {
  const VectorXd h = eta_variances();
  const int T = periods();
  MatrixXd s(T, T);
  for (int t = 0; t < T; ++t)
    for (int r = 0; r < T; ++r) s(t, r) = h(std::min(t, r));
  s.diagonal() += var_eps;
  return s;
}

PtParams PtParams::stationary(int periods, double var_eta1, double var_v, double var_eps) {
  require(periods >= 1, "pt params: at least one period is required");
  PtParams p;
  p.var_eta1 = var_eta1;
  p.var_v = VectorXd::Constant(periods - 1, var_v);
  p.var_eps = VectorXd::Constant(periods, var_eps);
  p.validate();
  return p;
}

PtParams psid_like_params() { return PtParams::stationary(6, 0.30, 0.04, 0.10); }

// ------------------------------------------------------------------ estimation

PtFit estimate_pt(const PanelData& panel) {
  const auto n = panel.units();
  const int T = static_cast<int>(panel.periods());
  if (T < 3) throw IdentificationError("estimate_pt: at least three periods are required");
  require(n >= 2, "estimate_pt: at least two units are required");
  require(panel.y.allFinite(), "estimate_pt: non-finite outcomes");
  const MatrixXd centered = panel.y.rowwise() - panel.y.colwise().mean();
  PtFit fit;
  fit.empirical_covariance = centered.transpose() * centered / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(fit.empirical_covariance, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < 0.0) fit.warnings.push_back("estimate_pt: empirical covariance is not PSD");

  // Unknowns: H_1, Var(V_2..V_{T-1}), Var(eps_1..eps_T); Var(V_T) = Var(V_{T-1}).
  const int free_v = T - 2;
  const int p = 1 + free_v + T;
  const int m = T * (T + 1) / 2;
  MatrixXd design = MatrixXd::Zero(m, p);
  VectorXd target(m);
  int row = 0;
  for (int t = 0; t < T; ++t)
    for (int s = 0; s <= t; ++s, ++row) {
      // Var(eta_s) = H_1 + sum_{k=1..s} Var(V_{k+1}) (zero-based s).
      design(row, 0) = 1.0;
      for (int k = 1; k <= s; ++k) design(row, std::min(k, free_v)) += 1.0;
      if (s == t) design(row, 1 + free_v + t) = 1.0;
      target(row) = fit.empirical_covariance(t, s);
    }
  const VectorXd theta = design.colPivHouseholderQr().solve(target);

  auto clip = [&](double v, const std::string& name) {
    if (v < 0.0) {
      fit.truncated.push_back(name);
      return 0.0;
    }
    return v;
  };
  PtParams& out = fit.params;
  out.var_eta1 = clip(theta(0), "var_eta1");
  out.var_v.resize(T - 1);
  for (int k = 0; k < T - 1; ++k)
    out.var_v(k) = clip(theta(1 + std::min(k, free_v - 1)), "var_v[" + std::to_string(k + 2) + "]");
  out.var_eps.resize(T);
  for (int t = 0; t < T; ++t) out.var_eps(t) = clip(theta(1 + free_v + t), "var_eps[" + std::to_string(t + 1) + "]");
  if (!fit.truncated.empty()) fit.warnings.push_back("estimate_pt: negative variance estimates truncated at zero");
  out.validate();
  return fit;
}

Component parse_component(const std::string& name) {
  if (name == "eta" || name == "permanent") return Component::eta;
  if (name == "eps" || name == "transitory") return Component::eps;
  throw ValidationError("unknown income component '" + name + "' (expected eta or eps)");
}

std::string component_name(Component c) { return c == Component::eta ? "eta" : "eps"; }

// ------------------------------------------------------------------- posterior

PtPosterior::PtPosterior(PtParams params) : params_(std::move(params)) {
  params_.validate();
  const int T = params_.periods();
  const MatrixXd sigma = params_.covariance();
  Eigen::LLT<MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw NumericalError("pt posterior: covariance of Y is singular");
  const VectorXd h = params_.eta_variances();
  sd_eta_.resize(T);
  sd_eps_.resize(T);
  for (int t = 0; t < T; ++t) {
    VectorXd c(T);
    for (int s = 0; s < T; ++s) c(s) = h(std::min(t, s));
    VectorXd w = llt.solve(c);
    sd_eta_(t) = std::sqrt(std::max(h(t) - c.dot(w), 0.0));
    w_eta_.push_back(std::move(w));
    const VectorXd e = VectorXd::Unit(T, t) * params_.var_eps(t);
    VectorXd we = llt.solve(e);
    sd_eps_(t) = std::sqrt(std::max(params_.var_eps(t) - e.dot(we), 0.0));
    w_eps_.push_back(std::move(we));
  }
}

const VectorXd& PtPosterior::weights(Component c, int t) const {
  require(t >= 0 && t < params_.periods(), "pt posterior: period out of range");
  return c == Component::eta ? w_eta_[static_cast<std::size_t>(t)] : w_eps_[static_cast<std::size_t>(t)];
}

double PtPosterior::sd(Component c, int t) const {
  require(t >= 0 && t < params_.periods(), "pt posterior: period out of range");
  return c == Component::eta ? sd_eta_(t) : sd_eps_(t);
}

double PtPosterior::mean(Component c, int t, const VectorXd& y) const {
  require(y.size() == params_.periods(), "pt posterior: outcome vector has the wrong length");
  return weights(c, t).dot(y);
}

MatrixXd PtPosterior::means(const PanelData& panel, Component c) const {
  require(panel.periods() == params_.periods(), "pt posterior: panel and parameters differ in T");
  MatrixXd w(params_.periods(), params_.periods());
  for (int t = 0; t < params_.periods(); ++t) w.col(t) = weights(c, t);
  return panel.y * w;
}

double PtPosterior::prior_sd(Component c, int t) const {
  require(t >= 0 && t < params_.periods(), "pt posterior: period out of range");
  return std::sqrt(c == Component::eta ? params_.eta_variances()(t) : params_.var_eps(t));
}

ComponentDistribution::ComponentDistribution(const PanelData& panel, const PtParams& params, Component c) {
  const PtPosterior post(params);
  require(panel.units() >= 1, "component distribution: empty panel");
  PanelData centered = panel;
  centered.y = panel.y.rowwise() - panel.y.colwise().mean();
  means_ = post.means(centered, c);
  const int T = params.periods();
  sd_.resize(T);
  prior_sd_.resize(T);
  for (int t = 0; t < T; ++t) {
    sd_(t) = post.sd(c, t);
    prior_sd_(t) = post.prior_sd(c, t);
  }
}

double ComponentDistribution::cdf(int t, double a) const {
  require(t >= 0 && t < periods(), "component distribution: period out of range");
  const double s = sd_(t);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < means_.rows(); ++i) {
    const double m = means_(i, t);
    acc += s > 0.0 ? stats::normal_cdf((a - m) / s) : (m <= a ? 1.0 : 0.0);
  }
  return acc / static_cast<double>(means_.rows());
}

double ComponentDistribution::quantile(int t, double tau, double tol) const {
  require(tau > 0.0 && tau < 1.0, "component distribution: tau must lie in (0, 1)");
  const double scale = std::max({prior_sd_(t), sd_(t), 1e-12});
  double lo = means_.col(t).minCoeff() - scale, hi = means_.col(t).maxCoeff() + scale;
  for (int k = 0; cdf(t, lo) > tau && k < 200; ++k) lo -= (hi - lo);
  for (int k = 0; cdf(t, hi) < tau && k < 200; ++k) hi += (hi - lo);
  if (cdf(t, lo) > tau || cdf(t, hi) < tau) throw NumericalError("component distribution: cannot bracket quantile");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (cdf(t, mid) < tau ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ComponentDistribution::model_quantile(int t, double tau) const {
  require(t >= 0 && t < periods(), "component distribution: period out of range");
  return prior_sd_(t) * stats::normal_quantile(tau);
}

double posterior_component_cdf(const PanelData& panel, const PtParams& params, Component c, int t, double a) {
  return ComponentDistribution(panel, params, c).cdf(t, a);
}

QuantileCurve quantile_difference_curve(const PanelData& panel, const PtParams& params, Component c,
                                        const std::vector<double>& tau) {
  const ComponentDistribution dist(panel, params, c);
  QuantileCurve curve;
  curve.tau = tau;
  for (double q : tau) {
    double acc = 0.0;
    for (int t = 0; t < dist.periods(); ++t) acc += dist.quantile(t, q) - dist.model_quantile(t, q);
    curve.difference.push_back(acc / dist.periods());
  }
  return curve;
}

// ----------------------------------------------------------------------- model

PermanentTransitoryModel::PermanentTransitoryModel(PtParams params) : params_(params), posterior_(std::move(params)) {}

Vector PermanentTransitoryModel::parameters() const {
  const int T = params_.periods();
  Vector theta(2 * T);
  theta << params_.var_eta1, params_.var_v, params_.var_eps;
  return theta;
}

ModelPtr PermanentTransitoryModel::with_parameters(const Vector& theta) const {
  const int T = params_.periods();
  require(theta.size() == 2 * T, "permanent_transitory: wrong parameter length");
  PtParams p;
  p.var_eta1 = theta(0);
  p.var_v = theta.segment(1, T - 1);
  p.var_eps = theta.tail(T);
  return std::make_shared<PermanentTransitoryModel>(p);
}

Vector PermanentTransitoryModel::draw_latent(const Vector&, stats::RngStream& rng) const {
  const int T = params_.periods();
  Vector u(2 * T);
  double eta = std::sqrt(params_.var_eta1) * rng.normal();
  for (int t = 0; t < T; ++t) {
    if (t > 0) eta += std::sqrt(params_.var_v(t - 1)) * rng.normal();
    u(t) = eta;
  }
  for (int t = 0; t < T; ++t) u(T + t) = std::sqrt(params_.var_eps(t)) * rng.normal();
  return u;
}

double PermanentTransitoryModel::log_density(const Vector& u, const Vector&) const {
  const int T = params_.periods();
  require(u.size() == 2 * T, "permanent_transitory: latent vector has the wrong length");
  auto term = [](double x, double var) {
    if (var == 0.0) return x == 0.0 ? 0.0 : -INFINITY;
    return -0.5 * (std::log(2.0 * std::numbers::pi * var) + x * x / var);
  };
  double lp = term(u(0), params_.var_eta1);
  for (int t = 1; t < T; ++t) lp += term(u(t) - u(t - 1), params_.var_v(t - 1));
  for (int t = 0; t < T; ++t) lp += term(u(T + t), params_.var_eps(t));
  return lp;
}

Vector PermanentTransitoryModel::outcome(const Vector& u, const Vector&) const {
  const int T = params_.periods();
  return u.head(T) + u.tail(T);
}

Vector PermanentTransitoryModel::moments(const Vector& y, const Vector&) const {
  const int T = params_.periods();
  require(y.size() == T, "permanent_transitory: outcome has the wrong length");
  const MatrixXd sigma = params_.covariance();
  Vector g(T * (T + 1) / 2);
  int k = 0;
  for (int t = 0; t < T; ++t)
    for (int s = 0; s <= t; ++s) g(k++) = y(t) * y(s) - sigma(t, s);
  return g;
}

namespace {

const PermanentTransitoryModel& as_pt(const ReferenceModel& model) {
  const auto* pt = dynamic_cast<const PermanentTransitoryModel*>(&model);
  if (!pt) throw ValidationError("income target used with the '" + model.key() + "' model");
  return *pt;
}

}  // namespace

Target component_indicator_target(Component c, int t, double a) {
  Target target;
  target.name = component_name(c) + "[" + std::to_string(t + 1) + "]<=" + std::to_string(a);
  target.delta = [c, t, a](const ReferenceModel& m, const Vector& u, const Vector&) {
    const int T = as_pt(m).params().periods();
    return u(c == Component::eta ? t : T + t) <= a ? 1.0 : 0.0;
  };
  target.posterior_mean = [c, t, a](const ReferenceModel& m, const Vector& y, const Vector&) {
    const auto& post = as_pt(m).posterior();
    const double mean = post.mean(c, t, y), s = post.sd(c, t);
    if (s == 0.0) return mean <= a ? 1.0 : 0.0;
    return stats::normal_cdf((a - mean) / s);
  };
  target.model_mean = [c, t, a](const ReferenceModel& m, const Vector&) {
    const double s = as_pt(m).posterior().prior_sd(c, t);
    if (s == 0.0) return a >= 0.0 ? 1.0 : 0.0;
    return stats::normal_cdf(a / s);
  };
  return target;
}

R2Curve pt_informativeness(const PtParams& params, Component c, const std::vector<double>& tau, std::size_t draws,
                           stats::RngStream& rng) {
  const auto model = std::make_shared<PermanentTransitoryModel>(params);
  const std::vector<Vector> covariates{Vector(0)};
  const ReferenceSimulation sim(*model, covariates, draws, rng);
  const int T = params.periods();
  R2Curve curve;
  curve.tau = tau;
  for (double q : tau) {
    require(q > 0.0 && q < 1.0, "pt_informativeness: tau must lie in (0, 1)");
    double r2 = 0.0, se = 0.0;
    for (int t = 0; t < T; ++t) {
      const double a = model->posterior().prior_sd(c, t) * stats::normal_quantile(q);
      const Target target = component_indicator_target(c, t, a);
      const auto info = informativeness(sim, *model, target, PosteriorLaw::closed_form(model, target));
      r2 += info.r2;
      se += info.r2_se;
    }
    curve.r2.push_back(r2 / T);
    curve.r2_se.push_back(se / T);
  }
  return curve;
}

// ------------------------------------------------------------------ simulation

void PtSimulationConfig::validate() const {
  params.validate();
  if (scale_mixture) {
    require(mixture_prob > 0.0 && mixture_prob < 1.0, "pt simulation: mixture_prob must lie in (0, 1)");
    require(mixture_ratio >= 1.0, "pt simulation: mixture_ratio must be at least 1");
  }
}

PtSimulationConfig PtSimulationConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("pt simulation config: ") + e.what());
  }
  require(j.is_object(), "pt simulation config: expected a JSON object");
  PtSimulationConfig cfg;
  const PtParams base = psid_like_params();
  int T = j.value("periods", base.periods());
  if (j.contains("var_eps") && j["var_eps"].is_array()) T = static_cast<int>(j["var_eps"].size());
  require(T >= 1, "pt simulation config: periods must be positive");
  auto vector_of = [&](const char* key, int length, double fallback) {
    VectorXd v = VectorXd::Constant(length, fallback);
    if (!j.contains(key)) return v;
    const auto& node = j[key];
    if (node.is_number()) return VectorXd::Constant(length, node.get<double>()).eval();
    require(node.is_array() && static_cast<int>(node.size()) == length,
            std::string("pt simulation config: '") + key + "' must be a number or an array of length " +
                std::to_string(length));
    for (int k = 0; k < length; ++k) v(k) = node[static_cast<std::size_t>(k)].get<double>();
    return v;
  };
  cfg.params.var_eta1 = j.value("var_eta1", base.var_eta1);
  cfg.params.var_v = vector_of("var_v", T - 1, base.var_v.size() ? base.var_v(0) : 0.0);
  cfg.params.var_eps = vector_of("var_eps", T, base.var_eps(0));
  const std::string shape = j.value("shape", std::string("gaussian"));
  require(shape == "gaussian" || shape == "scale_mixture",
          "pt simulation config: shape must be 'gaussian' or 'scale_mixture'");
  cfg.scale_mixture = shape == "scale_mixture";
  cfg.mixture_prob = j.value("mixture_prob", cfg.mixture_prob);
  cfg.mixture_ratio = j.value("mixture_ratio", cfg.mixture_ratio);
  cfg.mix_permanent = j.value("mix_permanent", cfg.mix_permanent);
  cfg.mix_transitory = j.value("mix_transitory", cfg.mix_transitory);
  cfg.validate();
  return cfg;
}

PanelData simulate_pt(const PtSimulationConfig& config, std::size_t n, stats::RngStream& rng) {
  config.validate();
  require(n >= 1, "simulate_pt: n must be positive");
  const PtParams& p = config.params;
  const int T = p.periods();
  const double w_lo = 1.0 / (1.0 - config.mixture_prob + config.mixture_prob * config.mixture_ratio);
  const double w_hi = config.mixture_ratio * w_lo;
  auto scale = [&](bool mixed) {
    if (!config.scale_mixture || !mixed) return 1.0;
    return std::sqrt(rng.uniform() < config.mixture_prob ? w_hi : w_lo);
  };
  MatrixXd y(static_cast<Eigen::Index>(n), T);
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    double eta = scale(config.mix_permanent) * std::sqrt(p.var_eta1) * rng.normal();
    for (int t = 0; t < T; ++t) {
      if (t > 0) {
        const double s = scale(config.mix_permanent);
        eta += s * std::sqrt(p.var_v(t - 1)) * rng.normal();
      }
      const double s = scale(config.mix_transitory);
      y(i, t) = eta + s * std::sqrt(p.var_eps(t)) * rng.normal();
    }
  }
  return PanelData::from_matrix(std::move(y));
}

}  // namespace robpost::income
