#include "robpost/robustness/inference.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "robpost/error.hpp"
#include "robpost/framework/posterior.hpp"
#include "robpost/stats/normal.hpp"

namespace robpost {

namespace {

struct Averages {
  double model = 0.0;
  double posterior = 0.0;
};

Averages sample_averages(const ReferenceModel& model, const Sample& data, const Target& target) {
  const auto post = posterior_mean_map(model, target);
  const auto prior = model_mean_map(model, target);
  Averages a;
  for (const auto& o : data) {
    const auto m = prior(o.x);
    if (!m) throw ValidationError("target '" + target.name + "' has no exact model-based mean");
    a.model += *m;
    a.posterior += post(o.y, o.x);
  }
  a.model /= static_cast<double>(data.size());
  a.posterior /= static_cast<double>(data.size());
  return a;
}

struct Gradients {
  Eigen::VectorXd model, posterior;
};

Gradients central_differences(const ReferenceModel& model, const Sample& data, const Target& target, double rel) {
  const Vector theta = model.parameters();
  Gradients g{Eigen::VectorXd(theta.size()), Eigen::VectorXd(theta.size())};
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    const double h = rel * std::max(std::abs(theta(k)), 1.0);
    Vector up = theta, down = theta;
    up(k) += h;
    down(k) -= h;
    const Averages a = sample_averages(*model.with_parameters(up), data, target);
    const Averages b = sample_averages(*model.with_parameters(down), data, target);
    g.model(k) = (a.model - b.model) / (2.0 * h);
    g.posterior(k) = (a.posterior - b.posterior) / (2.0 * h);
  }
  if (!g.model.allFinite() || !g.posterior.allFinite())
    throw NumericalError("asymptotic_variance: non-finite parameter gradient");
  return g;
}

bool agree(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k)
    if (std::abs(a(k) - b(k)) > 1e-3 * std::max({std::abs(a(k)), std::abs(b(k)), 1e-6})) return false;
  return true;
}

}  // namespace

AsymptoticVariance asymptotic_variance(const ReferenceModel& model, const Sample& data, const Target& target,
                                       const ReferenceSimulation& sim) {
  require(!data.empty(), "asymptotic_variance: empty sample");
  AsymptoticVariance out;
  const Gradients g = central_differences(model, data, target, 1e-5);
  const Gradients half = central_differences(model, data, target, 0.5e-5);
  if (!agree(g.model, half.model) || !agree(g.posterior, half.posterior))
    out.warnings.push_back("asymptotic_variance: finite-difference gradients disagree at half step beyond 1e-3");
  out.g_model = g.model;
  out.g_posterior = g.posterior;

  const auto& dr = sim.draws();
  const auto post = posterior_mean_map(model, target);
  const auto prior = model_mean_map(model, target);
  std::vector<double> prior_row(dr.covariates.size());
  for (std::size_t r = 0; r < prior_row.size(); ++r) {
    const auto m = prior(dr.covariates[r]);
    if (!m) throw ValidationError("target '" + target.name + "' has no exact model-based mean");
    prior_row[r] = *m;
  }
  const auto S = static_cast<Eigen::Index>(dr.size());
  Eigen::MatrixXd ab(S, 2);
  for (Eigen::Index s = 0; s < S; ++s) {
    const Vector h = model.influence(dr.y[s], dr.x(s));
    double adj_m = 0.0, adj_p = 0.0;
    if (h.size() > 0) {
      require(h.size() == g.model.size(), "asymptotic_variance: influence length differs from parameter length");
      adj_m = g.model.dot(h);
      adj_p = g.posterior.dot(h);
    }
    ab(s, 0) = prior_row[dr.row[s]] + adj_m;
    ab(s, 1) = post(dr.y[s], dr.x(s)) + adj_p;
  }
  ab.rowwise() -= ab.colwise().mean();
  Eigen::Matrix2d sigma = ab.transpose() * ab / static_cast<double>(S);
  sigma(0, 1) = sigma(1, 0) = 0.5 * (sigma(0, 1) + sigma(1, 0));
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(sigma);
  if (eig.eigenvalues().minCoeff() < 0.0) {
    const Eigen::Vector2d ev = eig.eigenvalues().cwiseMax(0.0);
    sigma = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
    out.projected = true;
  }
  out.sigma = sigma;
  return out;
}

Interval bias_aware_ci(double estimate, double slope, double sigma22, std::size_t n, double epsilon, double level) {
  require(slope >= 0.0 && sigma22 >= 0.0 && epsilon >= 0.0, "bias_aware_ci: slope, variance and epsilon must be >= 0");
  require(n >= 1, "bias_aware_ci: sample size must be positive");
  require(level > 0.0 && level < 1.0, "bias_aware_ci: level must lie in (0, 1)");
  const double z = stats::normal_quantile(0.5 + 0.5 * level);
  Interval ci;
  ci.half_width = std::sqrt(epsilon) * slope + z * std::sqrt(sigma22 / static_cast<double>(n));
  ci.lower = estimate - ci.half_width;
  ci.upper = estimate + ci.half_width;
  return ci;
}

SpecificationTest specification_test(const ReferenceModel& model, const Sample& data, const Target& target,
                                     const ReferenceSimulation& sim) {
  SpecificationTest t;
  const Averages a = sample_averages(model, data, target);
  t.posterior_estimate = a.posterior;
  t.model_estimate = a.model;
  const double diff = a.posterior - a.model;
  if (diff == 0.0) return t;
  const AsymptoticVariance av = asymptotic_variance(model, data, target, sim);
  t.warnings = av.warnings;
  t.difference_variance = av.difference_variance();
  if (!(t.difference_variance > 0.0)) {
    std::ostringstream msg;
    msg << "specification_test: variance of the estimator difference is " << t.difference_variance
        << " (model variance " << av.sigma(0, 0) << ", posterior variance " << av.sigma(1, 1) << ", covariance "
        << av.sigma(0, 1) << ")";
    throw NumericalError(msg.str());
  }
  t.statistic = static_cast<double>(data.size()) * diff * diff / t.difference_variance;
  t.p_value = stats::chi2_1_sf(t.statistic);
  return t;
}

SpecificationTest specification_test(const ReferenceModel& model, const Sample& data, const Target& target,
                                     std::size_t draws, stats::RngStream& rng) {
  const ReferenceSimulation sim(model, covariates_of(data), draws, rng);
  return specification_test(model, data, target, sim);
}

std::string bias_report_json(const BiasReport& report) {
  nlohmann::json j;
  j["leading"] = report.leading;
  j["slope"] = report.slope;
  j["lambda"] = std::vector<double>(report.lambda.data(), report.lambda.data() + report.lambda.size());
  j["epsilon"] = report.epsilon;
  j["envelope"] = report.envelope;
  j["mc_se"] = {{"leading", report.leading_se}, {"slope", report.slope_se}};
  if (!report.warnings.empty()) j["warnings"] = report.warnings;
  return j.dump(2);
}

}  // namespace robpost
