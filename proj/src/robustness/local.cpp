#include "robpost/robustness/local.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "robpost/error.hpp"
#include "robpost/stats/smoothing.hpp"

namespace robpost {

namespace {

double mean_of(const Eigen::VectorXd& v) { return v.mean(); }

double var_of(const Eigen::VectorXd& v) { return (v.array() - v.mean()).square().mean(); }

void tail_check(const Eigen::VectorXd& squares, const char* what, std::vector<std::string>& warnings) {
  const double total = squares.sum();
  if (total > 0.0 && squares.maxCoeff() > 0.05 * total) {
    std::ostringstream msg;
    msg << what << ": a single draw carries " << 100.0 * squares.maxCoeff() / total
        << "% of the variance; moments may not be finite";
    warnings.push_back(msg.str());
  }
}

}  // namespace

ReferenceSimulation::ReferenceSimulation(const ReferenceModel& model, const std::vector<Vector>& covariates,
                                         std::size_t draws, stats::RngStream& rng, std::size_t max_groups)
    : draws_(simulate_reference(model, covariates, draws, rng)) {
  const CovariateGroups groups = group_covariates(draws_.covariates);
  const auto S = static_cast<Eigen::Index>(draws_.size());
  if (groups.distinct.size() <= max_groups) {
    groups_ = groups.distinct.size();
    group_.resize(draws_.size());
    for (std::size_t s = 0; s < draws_.size(); ++s) group_[s] = groups.group_of[draws_.row[s]];
  } else {
    // Keep the non-constant covariate columns for kernel regression.
    const Vector& first = draws_.covariates.front();
    std::vector<Eigen::Index> cols;
    for (Eigen::Index c = 0; c < first.size(); ++c)
      for (const auto& r : draws_.covariates)
        if (r(c) != first(c)) {
          cols.push_back(c);
          break;
        }
    x_.resize(S, static_cast<Eigen::Index>(cols.size()));
    for (Eigen::Index s = 0; s < S; ++s)
      for (std::size_t k = 0; k < cols.size(); ++k) x_(s, static_cast<Eigen::Index>(k)) = draws_.x(s)(cols[k]);
  }
  const auto L = model.moments(draws_.y[0], draws_.x(0)).size();
  Eigen::MatrixXd psi(S, L);
  for (Eigen::Index s = 0; s < S; ++s) psi.row(s) = model.moments(draws_.y[s], draws_.x(s)).transpose();
  psi_tilde_ = center(psi);
}

Eigen::MatrixXd ReferenceSimulation::center(const Eigen::MatrixXd& values) const {
  require(values.rows() == static_cast<Eigen::Index>(draws_.size()), "center: one row per draw required");
  Eigen::MatrixXd out = values;
  if (!group_.empty()) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(groups_), values.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(groups_));
    for (Eigen::Index s = 0; s < values.rows(); ++s) {
      const auto g = static_cast<Eigen::Index>(group_[s]);
      sums.row(g) += values.row(s);
      counts(g) += 1.0;
    }
    for (Eigen::Index s = 0; s < values.rows(); ++s) {
      const auto g = static_cast<Eigen::Index>(group_[s]);
      out.row(s) -= sums.row(g) / counts(g);
    }
    return out;
  }
  if (x_.cols() == 0) {
    out.rowwise() -= values.colwise().mean();
    return out;
  }
  // Kernel regression on X, evaluated once per distinct covariate row.
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    const stats::NwRegressor fit(x_, values.col(c), {});
    std::vector<double> at_row(draws_.covariates.size(), NAN);
    for (Eigen::Index s = 0; s < values.rows(); ++s) {
      double& m = at_row[draws_.row[s]];
      if (std::isnan(m)) m = fit(x_.row(s).transpose());
      out(s, c) -= m;
    }
  }
  return out;
}

Eigen::VectorXd ReferenceSimulation::center(const Eigen::VectorXd& values) const {
  return center(Eigen::MatrixXd(values)).col(0);
}

Eigen::VectorXd projection_coefficients(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                                        std::vector<std::string>& warnings) {
  if (design.cols() == 0) return Eigen::VectorXd(0);
  const double n = static_cast<double>(design.rows());
  const Eigen::MatrixXd gram = design.transpose() * design / n;
  const Eigen::VectorXd cross = design.transpose() * target / n;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double cut = 1e-10 * std::max(ev.maxCoeff(), 0.0);
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(design.cols());
  int dropped = 0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k) <= cut) {
      ++dropped;
      continue;
    }
    const Eigen::VectorXd v = eig.eigenvectors().col(k);
    coef += v * (v.dot(cross) / ev(k));
  }
  if (dropped > 0) {
    std::ostringstream msg;
    msg << "moment Gram matrix is singular; dropped " << dropped << " collinear direction(s)";
    warnings.push_back(msg.str());
  }
  return coef;
}

BiasReport local_bias(const ReferenceSimulation& sim, const ReferenceModel& model, const OutcomeMap& gamma,
                      const Target& target, const DivergenceSpec& div, const std::vector<double>& epsilon_grid) {
  div.validate();
  const auto& dr = sim.draws();
  const auto S = static_cast<Eigen::Index>(dr.size());
  const LatentMap delta = target.bind(model);
  Eigen::VectorXd d(S);
  for (Eigen::Index s = 0; s < S; ++s) d(s) = gamma(dr.y[s], dr.x(s)) - delta(dr.u[s], dr.x(s));

  BiasReport rep;
  rep.leading = std::abs(mean_of(d));
  rep.leading_se = std::sqrt(var_of(d) / S);
  const Eigen::VectorXd dt = sim.center(d);
  rep.lambda = projection_coefficients(sim.centered_moments(), dt, rep.warnings);
  const Eigen::VectorXd r = rep.lambda.size() ? Eigen::VectorXd(dt - sim.centered_moments() * rep.lambda) : dt;
  const Eigen::VectorXd r2 = r.array().square();
  const double V = var_of(r);
  rep.slope = std::sqrt(2.0 / div.curvature() * V);
  rep.slope_se = rep.slope > 0.0 ? std::sqrt(var_of(r2) / S) / (div.curvature() * rep.slope) : 0.0;
  tail_check(r2, "local_bias", rep.warnings);
  for (double e : epsilon_grid) {
    require(e >= 0.0, "local_bias: epsilon must be nonnegative");
    rep.epsilon.push_back(e);
    rep.envelope.push_back(rep.leading + std::sqrt(e) * rep.slope);
  }
  return rep;
}

BiasReport local_bias(const ReferenceModel& model, const std::vector<Vector>& covariates, const OutcomeMap& gamma,
                      const Target& target, const DivergenceSpec& div, const RobustnessOptions& options,
                      stats::RngStream& rng) {
  const ReferenceSimulation sim(model, covariates, options.draws, rng, options.max_groups);
  return local_bias(sim, model, gamma, target, div, options.epsilon_grid);
}

namespace {

// E[delta | X] at every draw: exact when possible, else the simulation's own
// conditional mean.
Eigen::VectorXd model_means(const ReferenceSimulation& sim, const ReferenceModel& model, const Target& target,
                            const Eigen::VectorXd& delta_values) {
  const auto& dr = sim.draws();
  const auto mean_at = model_mean_map(model, target);
  std::vector<double> per_row(dr.covariates.size());
  bool exact = true;
  for (std::size_t r = 0; r < per_row.size() && exact; ++r) {
    const auto v = mean_at(dr.covariates[r]);
    if (v)
      per_row[r] = *v;
    else
      exact = false;
  }
  if (!exact) return delta_values - sim.center(delta_values);
  Eigen::VectorXd out(delta_values.size());
  for (Eigen::Index s = 0; s < out.size(); ++s) out(s) = per_row[dr.row[s]];
  return out;
}

struct R2Parts {
  double r2, ratio, var_v;
};

R2Parts r2_parts(const Eigen::VectorXd& v, const Eigen::VectorXd& ev) {
  const double var_v = var_of(v);
  return {var_of(ev) / var_v, std::sqrt(var_of(v - ev) / var_v), var_v};
}

}  // namespace

Informativeness informativeness(const ReferenceSimulation& sim, const ReferenceModel& model, const Target& target,
                                const PosteriorLaw& posterior) {
  const auto& dr = sim.draws();
  const auto S = static_cast<Eigen::Index>(dr.size());
  const LatentMap delta = target.bind(model);
  Eigen::VectorXd dv(S), post(S);
  for (Eigen::Index s = 0; s < S; ++s) {
    dv(s) = delta(dr.u[s], dr.x(s));
    post(s) = posterior(dr.y[s], dr.x(s));
  }
  const Eigen::VectorXd gm = model_means(sim, model, target, dv);
  const Eigen::VectorXd a = dv - gm;
  const Eigen::VectorXd p = post - gm;

  const Eigen::MatrixXd& psi = sim.centered_moments();
  Eigen::MatrixXd design(S, psi.cols() + 1);
  design << Eigen::VectorXd::Ones(S), psi;
  Informativeness out;
  const Eigen::VectorXd coef = projection_coefficients(design, a, out.warnings);
  out.lambda = coef.tail(psi.cols());
  const Eigen::VectorXd fitted = design * coef;
  const Eigen::VectorXd v = a - fitted;
  const Eigen::VectorXd ev = p - fitted;
  const R2Parts all = r2_parts(v, ev);
  if (!(all.var_v > 1e-14 * std::max(1.0, var_of(dv))))
    throw ValidationError("informativeness: target is degenerate (residual variance is zero)");
  out.r2 = all.r2;
  out.ratio = all.ratio;
  out.var_v = all.var_v;
  // Batch-means standard error.
  constexpr int batches = 20;
  if (S >= 20 * batches) {
    const Eigen::Index len = S / batches;
    double sum = 0.0, sum2 = 0.0;
    for (int b = 0; b < batches; ++b) {
      const R2Parts part = r2_parts(v.segment(b * len, len), ev.segment(b * len, len));
      sum += part.r2;
      sum2 += part.r2 * part.r2;
    }
    const double m = sum / batches;
    out.r2_se = std::sqrt(std::max(0.0, sum2 / batches - m * m) / (batches - 1));
  }
  return out;
}

double informativeness_r2(const ReferenceSimulation& sim, const ReferenceModel& model, const Target& target,
                          const PosteriorLaw& posterior) {
  return informativeness(sim, model, target, posterior).r2;
}

double bias_ratio(const ReferenceSimulation& sim, const ReferenceModel& model, const Target& target,
                  const PosteriorLaw& posterior) {
  return informativeness(sim, model, target, posterior).ratio;
}

PredictionErrorReport prediction_error_expansion(const ReferenceSimulation& sim, const ReferenceModel& model,
                                                 const OutcomeMap& gamma, const Target& target,
                                                 const PosteriorLaw& posterior, const DivergenceSpec& div) {
  div.validate();
  const auto& dr = sim.draws();
  const auto S = static_cast<Eigen::Index>(dr.size());
  const LatentMap delta = target.bind(model);
  Eigen::VectorXd e(S), resid_p(S);
  for (Eigen::Index s = 0; s < S; ++s) {
    const double d = delta(dr.u[s], dr.x(s));
    const double g = gamma(dr.y[s], dr.x(s));
    e(s) = (g - d) * (g - d);
    resid_p(s) = d - posterior(dr.y[s], dr.x(s));
  }
  PredictionErrorReport rep;
  rep.leading = mean_of(e);
  rep.leading_se = std::sqrt(var_of(e) / S);
  const Eigen::VectorXd et = sim.center(e);
  rep.lambda = projection_coefficients(sim.centered_moments(), et, rep.warnings);
  const Eigen::VectorXd r = rep.lambda.size() ? Eigen::VectorXd(et - sim.centered_moments() * rep.lambda) : et;
  rep.slope = std::sqrt(2.0 / div.curvature() * var_of(r));
  tail_check(r.array().square(), "prediction_error_expansion", rep.warnings);

  // Third posterior moment: quadrature on a subsample when available.
  const Eigen::Index checks = std::min<Eigen::Index>(S, 500);
  const Eigen::Index stride = S / checks;
  bool quadrature = true;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < checks && quadrature; ++k) {
    const Eigen::Index s = k * stride;
    const Vector& y = dr.y[s];
    const Vector& x = dr.x(s);
    const double center = posterior(y, x);
    const auto m2 = model.posterior_expectation(
        [&](const Vector& u, const Vector& xx) { return std::pow(delta(u, xx) - center, 2); }, y, x);
    const auto m3 = model.posterior_expectation(
        [&](const Vector& u, const Vector& xx) { return std::pow(delta(u, xx) - center, 3); }, y, x);
    if (!m2 || !m3) {
      quadrature = false;
      break;
    }
    if (*m2 > 0.0) worst = std::max(worst, std::abs(*m3) / std::pow(*m2, 1.5));
  }
  if (quadrature) {
    rep.skewness_statistic = worst;
    rep.zero_posterior_skewness = worst < 1e-6;
  } else {
    // Moment test: E[(delta - gamma_P)^3 w(Y,X)] = 0 for w = 1 and w = gamma_P.
    Eigen::VectorXd post(S);
    for (Eigen::Index s = 0; s < S; ++s) post(s) = posterior(dr.y[s], dr.x(s));
    const Eigen::VectorXd cube = resid_p.array().cube();
    const Eigen::VectorXd weighted = cube.cwiseProduct((post.array() - post.mean()).matrix());
    const double z1 = std::abs(mean_of(cube)) / std::sqrt(var_of(cube) / S + 1e-300);
    const double z2 = std::abs(mean_of(weighted)) / std::sqrt(var_of(weighted) / S + 1e-300);
    rep.skewness_statistic = std::max(z1, z2);
    rep.zero_posterior_skewness = rep.skewness_statistic < 3.0;
  }
  return rep;
}

}  // namespace robpost
