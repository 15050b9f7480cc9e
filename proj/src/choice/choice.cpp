#include "robpost/choice/choice.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "robpost/data/panel.hpp"
#include "robpost/error.hpp"
#include "robpost/stats/normal.hpp"
#include "robpost/stats/optimize.hpp"
#include "robpost/stats/quadrature.hpp"

namespace robpost::choice {

namespace {

constexpr double kInf = INFINITY;

double threshold(const ChoiceModelSpec& spec, std::size_t j) {
  // j in 0..J; mu_0 = -inf, mu_J = +inf.
  if (j == 0) return -kInf;
  if (j > spec.thresholds.size()) return kInf;
  return spec.thresholds[j - 1];
}

std::size_t category_of(const ChoiceModelSpec& spec, double y) {
  const double r = std::round(y);
  require(std::abs(y - r) < 1e-9 && r >= 1.0 && r <= static_cast<double>(spec.categories()),
          "ordered outcome must be an integer between 1 and the number of categories");
  return static_cast<std::size_t>(r);
}

std::string dropped_message(const char* where, std::size_t dropped, std::size_t n) {
  std::ostringstream msg;
  msg << where << ": dropped " << dropped << " of " << n << " observations with a degenerate index";
  return msg.str();
}

}  // namespace

void ChoiceModelSpec::validate() const {
  require(beta.size() >= 1 && beta.allFinite(), "choice model: beta must be a non-empty finite vector");
  require(std::isfinite(sigma) && sigma > 0.0, "choice model: sigma must be positive");
  for (std::size_t j = 0; j < thresholds.size(); ++j) {
    require(std::isfinite(thresholds[j]), "choice model: thresholds must be finite");
    if (j > 0) require(thresholds[j] > thresholds[j - 1], "choice model: thresholds must be strictly increasing");
  }
}

double ChoiceModelSpec::index(const Eigen::VectorXd& x) const {
  require(x.size() + 1 == beta.size(), "choice model: covariate length does not match beta");
  return beta(0) + x.dot(beta.tail(beta.size() - 1));
}

void ChoiceData::validate() const {
  require(static_cast<Eigen::Index>(y.size()) == x.rows(), "choice data: outcome and covariate rows differ");
  require(!y.empty(), "choice data: no observations");
  for (double v : y) require(std::isfinite(v), "choice data: non-finite outcome");
  require(x.allFinite(), "choice data: non-finite covariate");
}

double normal_mass(double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  if (lo > 0.0) return stats::normal_sf(lo) - stats::normal_sf(hi);
  return stats::normal_cdf(hi) - stats::normal_cdf(lo);
}

double truncated_normal_expectation(const std::function<double(double)>& f, double sigma, double lo, double hi) {
  require(sigma > 0.0, "truncated_normal_expectation: sigma must be positive");
  require(hi > lo, "truncated_normal_expectation: empty interval");
  const double zl = lo / sigma, zh = hi / sigma;
  constexpr int panels = 48, nodes = 20;
  double num = 0.0, den = 0.0;
  if (zl >= 0.0) {
    const double width = std::min(zh - zl, std::min(14.0, 40.0 / std::max(zl, 1e-12)));
    den = stats::integrate([&](double w) { return std::exp(-zl * w - 0.5 * w * w); }, 0.0, width, panels, nodes);
    num = stats::integrate([&](double w) { return f(sigma * (zl + w)) * std::exp(-zl * w - 0.5 * w * w); }, 0.0,
                           width, panels, nodes);
  } else if (zh <= 0.0) {
    const double width = std::min(zh - zl, std::min(14.0, 40.0 / std::max(-zh, 1e-12)));
    den = stats::integrate([&](double w) { return std::exp(zh * w - 0.5 * w * w); }, 0.0, width, panels, nodes);
    num = stats::integrate([&](double w) { return f(sigma * (zh - w)) * std::exp(zh * w - 0.5 * w * w); }, 0.0,
                           width, panels, nodes);
  } else {
    const double a = std::max(zl, -14.0), b = std::min(zh, 14.0);
    den = stats::integrate([&](double z) { return std::exp(-0.5 * z * z); }, a, b, panels, nodes);
    num = stats::integrate([&](double z) { return f(sigma * z) * std::exp(-0.5 * z * z); }, a, b, panels, nodes);
  }
  if (!(den > 0.0)) throw NumericalError("truncated_normal_expectation: interval carries no mass");
  return num / den;
}

double asf_model(const ChoiceModelSpec& spec, const Eigen::VectorXd& x) {
  spec.validate();
  return stats::normal_cdf(spec.index(x) / spec.sigma);
}

std::optional<double> asf_posterior_term(const ChoiceModelSpec& spec, double y, const Eigen::VectorXd& xi,
                                         const Eigen::VectorXd& x) {
  const double zx = spec.index(x) / spec.sigma;
  const double zi = spec.index(xi) / spec.sigma;
  const double q = stats::normal_cdf(zi), q_up = stats::normal_sf(zi);
  if (!(q > 0.0) || !(q_up > 0.0)) return std::nullopt;
  if (y > 0.5) return std::min(stats::normal_cdf(zx), q) / q;
  return std::max(normal_mass(zi, zx), 0.0) / q_up;
}

Estimate asf_posterior(const ChoiceModelSpec& spec, const ChoiceData& data, const Eigen::VectorXd& x) {
  spec.validate();
  data.validate();
  double sum = 0.0;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto term = asf_posterior_term(spec, data.y[i], data.x.row(static_cast<Eigen::Index>(i)).transpose(), x);
    if (!term) continue;
    ++kept;
    sum += *term;
  }
  Estimate out;
  if (kept < data.size()) out.warnings.push_back(dropped_message("asf_posterior", data.size() - kept, data.size()));
  if (kept == 0) throw NumericalError("asf_posterior: every observation has a degenerate index");
  out.value = sum / static_cast<double>(kept);
  return out;
}

ClosedFormBias worst_case_bias_closed_form(double target_index, double data_index) {
  require(std::isfinite(target_index) && std::isfinite(data_index), "worst_case_bias_closed_form: non-finite index");
  require(target_index > data_index, "worst_case_bias_closed_form: the target index must exceed the data index");
  const double pt = stats::normal_cdf(target_index);
  const double st = stats::normal_sf(target_index);
  ClosedFormBias out;
  out.bias_model = std::max(pt, st);
  out.bias_posterior = std::max(normal_mass(data_index, target_index), st) / stats::normal_sf(data_index);
  out.ratio = out.bias_posterior / out.bias_model;
  return out;
}

double ordered_category(const ChoiceModelSpec& spec, double latent_index) {
  const auto above =
      std::lower_bound(spec.thresholds.begin(), spec.thresholds.end(), latent_index) - spec.thresholds.begin();
  return 1.0 + static_cast<double>(above);
}

std::optional<double> ordered_asf_term(const ChoiceModelSpec& spec, double y, const Eigen::VectorXd& xi,
                                       const Eigen::VectorXd& x) {
  const std::size_t k = category_of(spec, y);
  const double mi = spec.index(xi), mx = spec.index(x);
  const double a = (threshold(spec, k - 1) - mi) / spec.sigma;
  const double b = (threshold(spec, k) - mi) / spec.sigma;
  const double mass = normal_mass(a, b);
  if (!(mass > 0.0)) return std::nullopt;
  double v = 1.0;
  for (std::size_t j = 1; j < spec.categories(); ++j) {
    const double t = (threshold(spec, j) - mx) / spec.sigma;
    v += normal_mass(std::max(t, a), b) / mass;
  }
  return v;
}

Estimate ordered_asf(const ChoiceModelSpec& spec, const ChoiceData& data, const Eigen::VectorXd& x, AsfMode mode) {
  spec.validate();
  Estimate out;
  if (mode == AsfMode::model) {
    const double mx = spec.index(x);
    double v = 1.0;
    for (double mu : spec.thresholds) v += stats::normal_cdf((mx - mu) / spec.sigma);
    out.value = v;
    return out;
  }
  data.validate();
  double sum = 0.0;
  std::size_t kept = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto term = ordered_asf_term(spec, data.y[i], data.x.row(static_cast<Eigen::Index>(i)).transpose(), x);
    if (!term) continue;
    ++kept;
    sum += *term;
  }
  if (kept < data.size()) out.warnings.push_back(dropped_message("ordered_asf", data.size() - kept, data.size()));
  if (kept == 0) throw NumericalError("ordered_asf: every observation has an empty interval");
  out.value = sum / static_cast<double>(kept);
  return out;
}

double error_cdf(const stats::Distribution& error, double u) {
  if (const auto* n = std::get_if<stats::Normal>(&error)) return stats::normal_cdf((u - n->mean) / n->sd);
  if (const auto* c = std::get_if<stats::Chi2Recentered>(&error)) {
    require(c->df == 1.0, "error_cdf: recentred chi-square supported with one degree of freedom");
    const double q = 1.0 + std::sqrt(2.0) * u;
    return q <= 0.0 ? 0.0 : 1.0 - stats::chi2_1_sf(q);
  }
  if (const auto* un = std::get_if<stats::Uniform>(&error)) return std::clamp((u - un->lo) / (un->hi - un->lo), 0.0, 1.0);
  throw ValidationError("error_cdf: unsupported error distribution");
}

double ordered_asf_under(const ChoiceModelSpec& spec, const stats::Distribution& error, const Eigen::VectorXd& x) {
  spec.validate();
  const double mx = spec.index(x);
  double v = 1.0;
  for (double mu : spec.thresholds) v += 1.0 - error_cdf(error, (mu - mx) / spec.sigma);
  return v;
}

namespace {

double log_mass(double a, double b) {
  const double m = normal_mass(a, b);
  return m > 0.0 ? std::log(m) : -745.0;
}

double fit_sigma(const std::function<double(double)>& loglik) {
  const double log_sigma =
      stats::golden_section_minimize([&](double ls) { return -loglik(std::exp(ls)); }, std::log(1e-3), std::log(1e3), 1e-10);
  return std::exp(log_sigma);
}

}  // namespace

double fit_ordered_sigma(const ChoiceModelSpec& spec, const ChoiceData& data) {
  data.validate();
  std::vector<double> index(data.size());
  std::vector<std::size_t> cat(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    index[i] = spec.index(data.x.row(static_cast<Eigen::Index>(i)).transpose());
    cat[i] = category_of(spec, data.y[i]);
  }
  return fit_sigma([&](double s) {
    double ll = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
      ll += log_mass((threshold(spec, cat[i] - 1) - index[i]) / s, (threshold(spec, cat[i]) - index[i]) / s);
    return ll;
  });
}

double fit_probit_sigma(const ChoiceModelSpec& spec, const ChoiceData& data) {
  data.validate();
  std::vector<double> index(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) index[i] = spec.index(data.x.row(static_cast<Eigen::Index>(i)).transpose());
  return fit_sigma([&](double s) {
    double ll = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double z = index[i] / s;
      ll += data.y[i] > 0.5 ? log_mass(-z, kInf) : log_mass(-kInf, -z);
    }
    return ll;
  });
}

std::vector<double> draw_thresholds(std::size_t categories, stats::RngStream& rng, double lo, double hi) {
  require(categories >= 1, "draw_thresholds: need at least one category");
  require(hi > lo, "draw_thresholds: empty range");
  std::vector<double> mu(categories - 1);
  for (auto& m : mu) m = lo + (hi - lo) * rng.uniform();
  std::sort(mu.begin(), mu.end());
  return mu;
}

namespace {

ChoiceData simulate_latent(const ChoiceModelSpec& spec, const stats::Distribution& error, std::size_t n,
                           stats::RngStream& rng, std::vector<double>& latent) {
  spec.validate();
  require(spec.beta.size() == 2, "simulate: one regressor expected (beta = intercept, slope)");
  require(n >= 1, "simulate: n must be positive");
  ChoiceData data;
  data.x.resize(static_cast<Eigen::Index>(n), 1);
  data.y.resize(n);
  latent.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.normal();
    data.x(static_cast<Eigen::Index>(i), 0) = x;
    latent[i] = spec.beta(0) + spec.beta(1) * x + spec.sigma * stats::draw_one(error, rng);
  }
  return data;
}

}  // namespace

ChoiceData simulate_choice(const ChoiceModelSpec& spec, const stats::Distribution& error, std::size_t n,
                           stats::RngStream& rng) {
  std::vector<double> ystar;
  ChoiceData data = simulate_latent(spec, error, n, rng, ystar);
  for (std::size_t i = 0; i < n; ++i) {
    data.y[i] = spec.thresholds.empty() ? (ystar[i] > 0.0 ? 1.0 : 0.0) : ordered_category(spec, ystar[i]);
  }
  return data;
}

ChoiceData simulate_censored(const ChoiceModelSpec& spec, const stats::Distribution& error, std::size_t n,
                             stats::RngStream& rng) {
  std::vector<double> ystar;
  ChoiceData data = simulate_latent(spec, error, n, rng, ystar);
  for (std::size_t i = 0; i < n; ++i) data.y[i] = std::max(ystar[i], 0.0);
  return data;
}

ChoiceData read_choice_csv(std::istream& in) {
  const CsvTable t = read_csv(in);
  const std::size_t ycol = t.column("y");
  std::vector<std::size_t> xcols;
  for (std::size_t d = 1;; ++d) {
    const auto it = std::find(t.header.begin(), t.header.end(), "x" + std::to_string(d));
    if (it == t.header.end()) break;
    xcols.push_back(static_cast<std::size_t>(it - t.header.begin()));
  }
  require(!xcols.empty(), "choice csv: at least one regressor column x1 is required");
  ChoiceData data;
  data.y.resize(t.rows.size());
  data.x.resize(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(xcols.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    data.y[r] = t.number(r, ycol);
    for (std::size_t d = 0; d < xcols.size(); ++d)
      data.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d)) = t.number(r, xcols[d]);
  }
  data.validate();
  return data;
}

void write_choice_csv(std::ostream& out, const ChoiceData& data) {
  out << "y";
  for (Eigen::Index d = 0; d < data.x.cols(); ++d) out << ",x" << d + 1;
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.y[i];
    for (Eigen::Index d = 0; d < data.x.cols(); ++d) out << ',' << data.x(static_cast<Eigen::Index>(i), d);
    out << '\n';
  }
}

}  // namespace robpost::choice
