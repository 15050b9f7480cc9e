#include "robpost/framework/posterior.hpp"

#include <cmath>
#include <sstream>

#include "robpost/error.hpp"

namespace robpost {

OutcomeMap posterior_mean_map(const ReferenceModel& model, const Target& target) {
  if (target.posterior_mean)
    return [&model, f = target.posterior_mean](const Vector& y, const Vector& x) { return f(model, y, x); };
  const LatentMap delta = target.bind(model);
  return [&model, delta, name = target.name](const Vector& y, const Vector& x) {
    const auto v = model.posterior_expectation(delta, y, x);
    if (!v) throw ValidationError("no exact posterior for target '" + name + "' under model '" + model.key() + "'");
    return *v;
  };
}

std::function<std::optional<double>(const Vector&)> model_mean_map(const ReferenceModel& model, const Target& target) {
  if (target.model_mean)
    return [&model, f = target.model_mean](const Vector& x) -> std::optional<double> { return f(model, x); };
  const LatentMap delta = target.bind(model);
  return [&model, delta](const Vector& x) { return model.prior_expectation(delta, x); };
}

PosteriorLaw PosteriorLaw::closed_form(ModelPtr model, const Target& target) {
  require(model != nullptr, "PosteriorLaw: null model");
  PosteriorLaw law;
  law.kind_ = Kind::closed_form;
  law.name_ = target.name;
  law.model_ = std::move(model);
  law.exact_ = posterior_mean_map(*law.model_, target);
  return law;
}

Vector PosteriorLaw::features(const Vector& y, const Vector& x) const {
  return model_->regression_features(y, x).cwiseQuotient(scale_);
}

double PosteriorLaw::operator()(const Vector& y, const Vector& x) const {
  if (kind_ == Kind::closed_form) return exact_(y, x);
  return (*surrogate_)(features(y, x));
}

bool PosteriorLaw::extrapolates(const Vector& y, const Vector& x) const {
  if (kind_ == Kind::closed_form) return false;
  const Vector f = features(y, x);
  if ((f.array() < lo_.array()).any() || (f.array() > hi_.array()).any()) return true;
  return surrogate_->extrapolated(f);
}

Estimate model_based_estimate(const ReferenceModel& model, const Target& target, const Sample& data, std::size_t draws,
                              stats::RngStream& rng) {
  require(draws >= 1, "model_based_estimate: need at least one draw");
  require(!data.empty(), "model_based_estimate: empty sample");
  const CovariateGroups groups = group_covariates(covariates_of(data));
  const LatentMap delta = target.bind(model);
  const double n = static_cast<double>(data.size());
  Estimate est;
  double var = 0.0;
  for (std::size_t g = 0; g < groups.distinct.size(); ++g) {
    stats::RngStream stream = rng.split(g);
    const Vector& x = groups.distinct[g];
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t s = 0; s < draws; ++s) {
      const double d = delta(model.draw_latent(x, stream), x);
      sum += d;
      sum2 += d * d;
    }
    const double m = sum / draws;
    const double v = std::max(0.0, sum2 / draws - m * m);
    const double share = groups.count[g] / n;
    est.value += share * m;
    var += share * share * v / draws;
  }
  est.mc_se = std::sqrt(var);
  return est;
}

Estimate model_based_estimate_exact(const ReferenceModel& model, const Target& target, const Sample& data) {
  require(!data.empty(), "model_based_estimate: empty sample");
  const CovariateGroups groups = group_covariates(covariates_of(data));
  const auto mean_at = model_mean_map(model, target);
  Estimate est;
  for (std::size_t g = 0; g < groups.distinct.size(); ++g) {
    const auto v = mean_at(groups.distinct[g]);
    if (!v) throw ValidationError("no exact model mean for target '" + target.name + "'");
    est.value += static_cast<double>(groups.count[g]) / data.size() * *v;
  }
  return est;
}

Estimate posterior_average_estimate(const PosteriorLaw& law, const Sample& data) {
  require(!data.empty(), "posterior_average_estimate: empty sample");
  Estimate est;
  std::size_t outside = 0;
  for (const auto& o : data) {
    est.value += law(o.y, o.x);
    if (law.extrapolates(o.y, o.x)) ++outside;
  }
  est.value /= static_cast<double>(data.size());
  if (outside > 0) {
    std::ostringstream msg;
    msg << "posterior surrogate for '" << law.target_name() << "' extrapolated at " << outside << " of "
        << data.size() << " observations";
    est.warnings.push_back(msg.str());
  }
  return est;
}

std::vector<Estimate> posterior_average_estimate(const std::vector<PosteriorLaw>& laws, const Sample& data) {
  std::vector<Estimate> out;
  out.reserve(laws.size());
  for (const auto& law : laws) out.push_back(posterior_average_estimate(law, data));
  return out;
}

std::vector<PosteriorLaw> sim_posterior_fit(ModelPtr model, const std::vector<Vector>& covariates, std::size_t draws,
                                            const stats::KernelSpec& spec, const std::vector<Target>& targets,
                                            stats::RngStream& rng) {
  require(model != nullptr, "sim_posterior_fit: null model");
  if (draws < 100) throw ValidationError("sim_posterior_fit: need at least 100 draws per covariate value");
  require(!covariates.empty(), "sim_posterior_fit: no covariate rows");
  const std::size_t distinct = group_covariates(covariates).distinct.size();
  const ReferenceDraws sim = simulate_reference(*model, covariates, draws * distinct, rng);
  const auto total = static_cast<Eigen::Index>(sim.size());

  const Vector f0 = model->regression_features(sim.y[0], sim.x(0));
  Eigen::MatrixXd F(total, f0.size());
  for (Eigen::Index s = 0; s < total; ++s) F.row(s) = model->regression_features(sim.y[s], sim.x(s)).transpose();
  Vector scale(F.cols());
  for (Eigen::Index c = 0; c < F.cols(); ++c) {
    const double sd = std::sqrt((F.col(c).array() - F.col(c).mean()).square().mean());
    scale(c) = sd > 0.0 ? sd : 1.0;
  }
  for (Eigen::Index c = 0; c < F.cols(); ++c) F.col(c) /= scale(c);
  const Vector lo = F.colwise().minCoeff().transpose();
  const Vector hi = F.colwise().maxCoeff().transpose();

  // R^2 on an evenly strided subsample of the training points.
  const Eigen::Index r2_points = std::min<Eigen::Index>(total, 2000);
  const Eigen::Index stride = total / r2_points;

  std::vector<PosteriorLaw> laws;
  for (const auto& target : targets) {
    const LatentMap delta = target.bind(*model);
    Vector v(total);
    for (Eigen::Index s = 0; s < total; ++s) v(s) = delta(sim.u[s], sim.x(s));
    PosteriorLaw law;
    law.kind_ = PosteriorLaw::Kind::simulated;
    law.name_ = target.name;
    law.model_ = model;
    law.surrogate_ = std::make_shared<const stats::NwRegressor>(F, v, spec);
    law.scale_ = scale;
    law.lo_ = lo;
    law.hi_ = hi;
    const double vbar = v.mean();
    double ss_res = 0.0, ss_tot = 0.0;
    for (Eigen::Index k = 0; k < r2_points; ++k) {
      const Eigen::Index s = k * stride;
      const double r = v(s) - (*law.surrogate_)(F.row(s).transpose());
      ss_res += r * r;
      ss_tot += (v(s) - vbar) * (v(s) - vbar);
    }
    law.r2_ = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    laws.push_back(std::move(law));
  }
  return laws;
}

Estimate nonlinear_effect(const ReferenceModel& model, const Sample& data, const LinearizedFunctional& functional) {
  require(!data.empty(), "nonlinear_effect: empty sample");
  Estimate est;
  est.value = functional.value_at_reference;
  if (!functional.influence) return est;
  const CovariateGroups groups = group_covariates(covariates_of(data));
  std::vector<double> prior(groups.distinct.size());
  for (std::size_t g = 0; g < prior.size(); ++g) {
    const auto v = model.prior_expectation(functional.influence, groups.distinct[g]);
    if (!v) throw ValidationError("nonlinear_effect: model '" + model.key() + "' has no prior quadrature");
    prior[g] = *v;
  }
  double correction = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto v = model.posterior_expectation(functional.influence, data[i].y, data[i].x);
    if (!v) throw ValidationError("nonlinear_effect: model '" + model.key() + "' has no posterior quadrature");
    correction += *v - prior[groups.group_of[i]];
  }
  est.value += correction / static_cast<double>(data.size());
  return est;
}

}  // namespace robpost
