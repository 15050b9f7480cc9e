#include "robpost/choice/models.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "robpost/error.hpp"
#include "robpost/stats/normal.hpp"
#include "robpost/stats/quadrature.hpp"

namespace robpost::choice {

namespace {

Vector scalar(double v) {
  Vector out(1);
  out(0) = v;
  return out;
}

ChoiceModelSpec spec_from(const ChoiceModelSpec& base, const Vector& theta) {
  require(theta.size() == base.beta.size() + 1, "choice model: wrong parameter length");
  ChoiceModelSpec s = base;
  s.beta = theta.head(base.beta.size());
  s.sigma = theta(theta.size() - 1);
  s.validate();
  return s;
}

const ChoiceModelSpec& spec_of(const ReferenceModel& model) {
  const auto* m = dynamic_cast<const IndexModelBase*>(&model);
  if (!m) throw ValidationError("choice target used with the '" + model.key() + "' model");
  return m->spec();
}

// Interval (lo, hi] of U consistent with ordered category y.
std::pair<double, double> category_interval(const ChoiceModelSpec& spec, double y, double index) {
  const double r = std::round(y);
  require(std::abs(y - r) < 1e-9 && r >= 1.0 && r <= static_cast<double>(spec.categories()),
          "ordered outcome must be an integer between 1 and the number of categories");
  const auto k = static_cast<std::size_t>(r);
  const double lo = k == 1 ? -INFINITY : spec.thresholds[k - 2] - index;
  const double hi = k == spec.categories() ? INFINITY : spec.thresholds[k - 1] - index;
  return {lo, hi};
}

}  // namespace

// ------------------------------------------------------------------ shared base

IndexModelBase::IndexModelBase(ChoiceModelSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

Vector IndexModelBase::parameters() const {
  Vector t(spec_.beta.size() + 1);
  t << spec_.beta, spec_.sigma;
  return t;
}

Vector IndexModelBase::draw_latent(const Vector&, stats::RngStream& rng) const {
  return scalar(spec_.sigma * rng.normal());
}

double IndexModelBase::log_density(const Vector& u, const Vector&) const {
  const double z = u(0) / spec_.sigma;
  return -0.5 * z * z - std::log(spec_.sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

std::optional<double> IndexModelBase::prior_expectation(const LatentMap& h, const Vector& x) const {
  Vector u(1);
  return stats::normal_expectation(
      [&](double v) {
        u(0) = v;
        return h(u, x);
      },
      0.0, spec_.sigma);
}

// -------------------------------------------------------------------- censored

CensoredModel::CensoredModel(ChoiceModelSpec spec, Eigen::MatrixXd information)
    : IndexModelBase(std::move(spec)), information_(std::move(information)) {
  const auto p = spec_.beta.size() + 1;
  require(information_.size() == 0 || (information_.rows() == p && information_.cols() == p),
          "censored: information matrix has the wrong size");
}

ModelPtr CensoredModel::with_parameters(const Vector& theta) const {
  return std::make_shared<CensoredModel>(spec_from(spec_, theta), information_);
}

Vector CensoredModel::outcome(const Vector& u, const Vector& x) const {
  return scalar(std::max(spec_.index(x) + u(0), 0.0));
}

Vector CensoredModel::moments(const Vector& y, const Vector& x) const { return tobit_score(spec_, y(0), x); }

Vector CensoredModel::regression_features(const Vector& y, const Vector& x) const {
  Vector f(2 + x.size());
  f << y(0), y(0) > 0.0 ? 1.0 : 0.0, x;
  return f;
}

std::optional<double> CensoredModel::posterior_expectation(const LatentMap& h, const Vector& y, const Vector& x) const {
  const double m = spec_.index(x);
  Vector u(1);
  if (y(0) > 0.0) {
    u(0) = y(0) - m;
    return h(u, x);
  }
  return truncated_normal_expectation(
      [&](double v) {
        u(0) = v;
        return h(u, x);
      },
      spec_.sigma, -INFINITY, -m);
}

Vector CensoredModel::influence(const Vector& y, const Vector& x) const {
  if (information_.size() == 0) return Vector(0);
  return information_.ldlt().solve(tobit_score(spec_, y(0), x));
}

// ---------------------------------------------------------------------- binary

ModelPtr BinaryChoiceModel::with_parameters(const Vector& theta) const {
  return std::make_shared<BinaryChoiceModel>(spec_from(spec_, theta));
}

Vector BinaryChoiceModel::outcome(const Vector& u, const Vector& x) const {
  return scalar(spec_.index(x) + u(0) > 0.0 ? 1.0 : 0.0);
}

Vector BinaryChoiceModel::moments(const Vector& y, const Vector& x) const {
  // d/dsigma of log Phi(+-m/sigma).
  const double m = spec_.index(x), s = spec_.sigma;
  const double v = y(0) > 0.5 ? -stats::inverse_mills(m / s) * m / (s * s) : stats::inverse_mills(-m / s) * m / (s * s);
  return scalar(v);
}

std::optional<double> BinaryChoiceModel::posterior_expectation(const LatentMap& h, const Vector& y,
                                                               const Vector& x) const {
  const double m = spec_.index(x);
  Vector u(1);
  auto f = [&](double v) {
    u(0) = v;
    return h(u, x);
  };
  if (y(0) > 0.5) return truncated_normal_expectation(f, spec_.sigma, -m, INFINITY);
  return truncated_normal_expectation(f, spec_.sigma, -INFINITY, -m);
}

// --------------------------------------------------------------------- ordered

OrderedChoiceModel::OrderedChoiceModel(ChoiceModelSpec spec) : IndexModelBase(std::move(spec)) {
  require(!spec_.thresholds.empty(), "ordered_choice: at least one threshold is required");
}

ModelPtr OrderedChoiceModel::with_parameters(const Vector& theta) const {
  return std::make_shared<OrderedChoiceModel>(spec_from(spec_, theta));
}

Vector OrderedChoiceModel::outcome(const Vector& u, const Vector& x) const {
  return scalar(ordered_category(spec_, spec_.index(x) + u(0)));
}

Vector OrderedChoiceModel::moments(const Vector& y, const Vector& x) const {
  const double s = spec_.sigma;
  const auto [lo, hi] = category_interval(spec_, y(0), spec_.index(x));
  const double a = lo / s, b = hi / s;
  const double mass = normal_mass(a, b);
  if (!(mass > 0.0)) throw NumericalError("ordered_choice: observed category has no probability");
  double d = 0.0;
  if (std::isfinite(b)) d -= stats::normal_pdf(b) * b / s;
  if (std::isfinite(a)) d += stats::normal_pdf(a) * a / s;
  return scalar(d / mass);
}

std::optional<double> OrderedChoiceModel::posterior_expectation(const LatentMap& h, const Vector& y,
                                                                const Vector& x) const {
  const auto [lo, hi] = category_interval(spec_, y(0), spec_.index(x));
  Vector u(1);
  return truncated_normal_expectation(
      [&](double v) {
        u(0) = v;
        return h(u, x);
      },
      spec_.sigma, lo, hi);
}

// ---------------------------------------------------------------------- shared

Sample to_sample(const ChoiceData& data) {
  data.validate();
  Sample out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    out.push_back({scalar(data.y[i]), data.x.row(static_cast<Eigen::Index>(i)).transpose()});
  return out;
}

Target binary_asf_target(Eigen::VectorXd x_star) {
  Target t;
  t.name = "asf";
  t.delta = [x_star](const ReferenceModel& m, const Vector& u, const Vector&) {
    return spec_of(m).index(x_star) + u(0) >= 0.0 ? 1.0 : 0.0;
  };
  t.posterior_mean = [x_star](const ReferenceModel& m, const Vector& y, const Vector& x) {
    const auto term = asf_posterior_term(spec_of(m), y(0), x, x_star);
    if (!term) throw NumericalError("binary ASF: degenerate index at an observation");
    return *term;
  };
  t.model_mean = [x_star](const ReferenceModel& m, const Vector&) { return asf_model(spec_of(m), x_star); };
  return t;
}

Target ordered_asf_target(Eigen::VectorXd x_star) {
  Target t;
  t.name = "ordered_asf";
  t.delta = [x_star](const ReferenceModel& m, const Vector& u, const Vector&) {
    const auto& s = spec_of(m);
    return ordered_category(s, s.index(x_star) + u(0));
  };
  t.posterior_mean = [x_star](const ReferenceModel& m, const Vector& y, const Vector& x) {
    const auto term = ordered_asf_term(spec_of(m), y(0), x, x_star);
    if (!term) throw NumericalError("ordered ASF: observed category has no probability");
    return *term;
  };
  t.model_mean = [x_star](const ReferenceModel& m, const Vector&) {
    return ordered_asf(spec_of(m), ChoiceData{}, x_star, AsfMode::model).value;
  };
  return t;
}

Target censored_outcome_target(const OutcomeFunction& h, std::string name) {
  Target t;
  t.name = std::move(name);
  t.delta = [h](const ReferenceModel& m, const Vector& u, const Vector& x) { return h(spec_of(m).index(x) + u(0)); };
  t.posterior_mean = [h](const ReferenceModel& m, const Vector& y, const Vector& x) {
    if (y(0) > 0.0) return h(y(0));
    const auto& s = spec_of(m);
    return censored_cell_expectation(h, s.index(x), s.sigma);
  };
  t.model_mean = [h](const ReferenceModel& m, const Vector& x) {
    const auto& s = spec_of(m);
    return stats::normal_expectation(h, s.index(x), s.sigma);
  };
  return t;
}

}  // namespace robpost::choice
