#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "robpost/error.hpp"
#include "robpost/fixed_effects/estimators.hpp"
#include "robpost/fixed_effects/neighborhood.hpp"
#include "robpost/fixed_effects/params.hpp"
#include "robpost/fixed_effects/simulate.hpp"
#include "robpost/stats/distributions.hpp"
#include "robpost/stats/normal.hpp"
#include "robpost/stats/quadrature.hpp"
#include "robpost/stats/summary.hpp"

using namespace robpost;
using namespace robpost::fe;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(v.size());
  Eigen::Index i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

// Independent CDF integration: mean = int_0^inf (1-F) - int_-inf^0 F, and the
// second moment from 2 int x (1 - F(x) - F(-x)) over x > 0.
template <class F>
std::pair<double, double> moments_from_cdf(F&& cdf, double lo, double hi) {
  const double m = stats::integrate([&](double x) { return x >= 0 ? 1 - cdf(x) : -cdf(x); }, lo, 0, 200, 20) +
                   stats::integrate([&](double x) { return 1 - cdf(x); }, 0, hi, 200, 20);
  const double m2 = stats::integrate([&](double x) { return 2 * x * (1 - cdf(x) + cdf(-x)); }, 0,
                                     std::max(-lo, hi), 400, 20);
  return {m, m2 - m * m};
}

// Gini of a positive variable with cdf F on a grid, by int F(1-F) dx / E X.
double gini_from_density(const std::function<double(double)>& density_alpha, double lo, double hi, int steps) {
  const double h = (hi - lo) / steps;
  double F = 0.0, num = 0.0, ex = 0.0, prev = density_alpha(lo), prev_term = 0.0;
  for (int k = 1; k <= steps; ++k) {
    const double a = lo + k * h;
    const double d = density_alpha(a);
    ex += 0.5 * (d * std::exp(a) + prev * std::exp(a - h)) * h;
    F += 0.5 * (d + prev) * h;
    const double term = F * (1 - F) * std::exp(a);
    num += 0.5 * (term + prev_term) * h;
    prev = d;
    prev_term = term;
  }
  return num / ex;
}

// Same functional when the CDF is available in closed form.
double gini_from_cdf(const std::function<double(double)>& cdf, const std::function<double(double)>& density,
                     double lo, double hi) {
  const double num = stats::integrate([&](double a) { const double F = cdf(a); return F * (1 - F) * std::exp(a); },
                                      lo, hi, 400, 20);
  const double ex = stats::integrate([&](double a) { return density(a) * std::exp(a); }, lo, hi, 400, 20);
  return num / ex;
}

}  // namespace

TEST_CASE("estimate_params in the noiseless case") {
  Eigen::MatrixXd y(4, 3);
  y << -1, -1, -1, 1, 1, 1, -1, -1, -1, 1, 1, 1;
  const auto p = estimate_params(PanelData::from_matrix(y));
  CHECK(p.var_eps == 0.0);
  CHECK(p.var_alpha == doctest::Approx(1.0));
  CHECK(p.shrinkage() == doctest::Approx(1.0));
  CHECK_FALSE(p.truncated);
}

TEST_CASE("estimate_params errors") {
  CHECK_THROWS_AS(estimate_params(PanelData::from_matrix(Eigen::MatrixXd::Ones(5, 1))), IdentificationError);
  CHECK_THROWS_AS(estimate_params(PanelData::from_matrix(Eigen::MatrixXd::Ones(1, 3))), ValidationError);
  Eigen::MatrixXd y(3, 2);
  y << 0, 1, 1, 0, 0.5, 0.5;  // between-unit variance below the noise share
  const auto p = estimate_params(PanelData::from_matrix(y));
  CHECK(p.truncated);
  CHECK(p.var_alpha == 0.0);
}

TEST_CASE("variance decomposition with externally supplied noise") {
  const auto d = decompose_variance(0.077, 0.047);
  CHECK(std::fabs(d.var_signal - 0.030) < 1e-12);
  // exact algebra gives 0.3896; reported to two decimals by truncation this is .38
  CHECK(d.shrinkage == doctest::Approx(0.030 / 0.077).epsilon(1e-12));
  CHECK(std::floor(100 * d.shrinkage) / 100 == doctest::Approx(0.38));
}

TEST_CASE("estimate_params is unbiased in the normal model") {
  const int reps = 100;
  std::vector<double> mu(reps), va(reps), ve(reps);
  for (int r = 0; r < reps; ++r) {
    stats::RngStream rng(101, r);
    const auto panel = simulate_panel(1000, 5, stats::Normal{0, 1}, 1.0, rng);
    const auto p = estimate_params(panel);
    mu[r] = p.mu_alpha;
    va[r] = p.var_alpha;
    ve[r] = p.var_eps;
  }
  const auto within3se = [](const std::vector<double>& x, double truth) {
    return std::fabs(stats::mean(x) - truth) < 3 * std::sqrt(stats::sample_variance(x) / x.size());
  };
  CHECK(within3se(mu, 0.0));
  CHECK(within3se(va, 1.0 - 0.2 / 1000));  // 1/n divisor in the between variance
  CHECK(within3se(ve, 1.0));
}

TEST_CASE("distribution estimators on a tiny sample") {
  const auto ybar = vec({-1, 0, 1});
  CHECK(cdf_fe(ybar, -5) == 0.0);
  CHECK(cdf_fe(ybar, 5) == 1.0);
  CHECK(cdf_fe(ybar, 0) == doctest::Approx(2.0 / 3));

  FeParams p{0.0, 0.38, 0.62, 1};
  CHECK(p.shrinkage() == doctest::Approx(0.38));
  CHECK(cdf_pm(ybar, p, 0.2) == doctest::Approx(2.0 / 3));

  FeParams full{0.0, 1.0, 0.0, 1};
  for (double a : {-1.5, -1.0, -0.2, 0.0, 0.7, 1.0})
    CHECK(cdf_pm(ybar, full, a) == cdf_fe(ybar, a));
  CHECK(cdf_posterior(ybar, full, 0.5) == cdf_pm(ybar, full, 0.5));

  FeParams none{0.3, 0.0, 1.0, 1};
  CHECK(cdf_pm(ybar, none, 0.299) == 0.0);
  CHECK(cdf_pm(ybar, none, 0.3) == 1.0);

  FeParams half{0.0, 1.0, 1.0, 1};
  CHECK(cdf_posterior(vec({0.0}), half, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("cdf_model") {
  FeParams p{0.4, 2.0, 1.0, 3};
  CHECK(cdf_model(p, 0.4) == doctest::Approx(0.5));
  CHECK(std::fabs(cdf_model(p, 0.4 + 1.959963984540054 * std::sqrt(2.0)) - 0.975) < 1e-6);
  FeParams degenerate{0.0, 0.0, 1.0, 1};
  CHECK_THROWS_AS(cdf_model(degenerate, 0.0), ValidationError);
}

TEST_CASE("implied moments of the posterior average CDF") {
  stats::RngStream rng(5, 0);
  const auto panel = simulate_panel(200, 4, stats::SkewNormal{0.2, 1.3, 0.8}, 1.5, rng);
  const auto ybar = panel.unit_means();
  const auto p = estimate_params(panel);
  const double rho = p.shrinkage();
  const auto mom = posterior_moments(ybar, p);
  const double var_ybar = (ybar.array() - ybar.mean()).square().mean();
  CHECK(mom.mean == doctest::Approx((1 - rho) * p.mu_alpha + rho * ybar.mean()).epsilon(1e-14));
  CHECK(mom.variance == doctest::Approx((1 - rho) * p.var_alpha + rho * rho * var_ybar).epsilon(1e-13));
  // the CDF itself integrates to the same moments
  const auto [m, v] = moments_from_cdf([&](double a) { return cdf_posterior(ybar, p, a); }, -15, 15);
  CHECK(m == doctest::Approx(mom.mean).epsilon(1e-8));
  CHECK(v == doctest::Approx(mom.variance).epsilon(1e-8));
}

TEST_CASE("all distribution estimators are monotone; the posterior one strictly") {
  stats::RngStream rng(6, 0);
  const auto panel = simulate_panel(50, 3, stats::Normal{0, 1}, 1.0, rng);
  const auto ybar = panel.unit_means();
  const auto p = estimate_params(panel);
  double pf = 0, pp = 0, ppost = 0, pm = 0;
  for (double a = -3; a <= 3; a += 0.01) {
    const double f = cdf_fe(ybar, a), e = cdf_pm(ybar, p, a), q = cdf_posterior(ybar, p, a), m = cdf_model(p, a);
    CHECK(f >= pf);
    CHECK(e >= pp);
    CHECK(q > ppost);
    CHECK(m >= pm);
    CHECK(q > 0.0);
    CHECK(q < 1.0);
    pf = f, pp = e, ppost = q, pm = m;
  }
}

TEST_CASE("variance ordering of fixed effects, posterior means and the variance estimate") {
  int ok = 0;
  for (int r = 0; r < 40; ++r) {
    stats::RngStream rng(8, r);
    const auto panel = simulate_panel(5000, 2, stats::Normal{0, 1}, 2.0, rng);  // rho = 0.5
    const auto ybar = panel.unit_means();
    const auto p = estimate_params(panel);
    const auto eb = empirical_bayes_means(ybar, p);
    const double v_eb = (eb.array() - eb.mean()).square().mean();
    const double v_y = (ybar.array() - ybar.mean()).square().mean();
    ok += (v_eb < p.var_alpha && p.var_alpha < v_y);
  }
  CHECK(ok >= 38);
}

TEST_CASE("as J grows the posterior average CDF approaches the empirical one") {
  std::vector<double> gaps;
  for (int J : {1, 5, 30}) {
    stats::RngStream rng(9, J);
    const auto panel = simulate_panel(2000, J, stats::SkewNormal{0, 1, 0.9}, 1.0, rng);
    const auto p = J == 1 ? estimate_params(panel, 1.0) : estimate_params(panel);
    const auto ybar = panel.unit_means();
    double gap = 0;
    for (double a = -3; a <= 3; a += 0.01) gap = std::max(gap, std::fabs(cdf_posterior(ybar, p, a) - cdf_fe(ybar, a)));
    gaps.push_back(gap);
  }
  CHECK(gaps[0] > gaps[1]);
  CHECK(gaps[1] > gaps[2]);
}

TEST_CASE("projection coefficients") {
  stats::RngStream rng(10, 0);
  const auto panel = simulate_panel(300, 3, stats::Normal{0.5, 1}, 1.0, rng);
  const auto ybar = panel.unit_means();
  const auto p = estimate_params(panel);
  const double rho = p.shrinkage();

  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(300, 1);
  const auto c = project_on_covariates(ybar, p, ones, ProjectionMode::posterior);
  CHECK(c.coefficients(0) == doctest::Approx((1 - rho) * p.mu_alpha + rho * ybar.mean()).epsilon(1e-12));

  Eigen::MatrixXd W(300, 3);
  for (int i = 0; i < 300; ++i) W.row(i) << 1.0, rng.normal(), rng.uniform();
  const auto post = project_on_covariates(ybar, p, W, ProjectionMode::posterior);
  const auto fe = project_on_covariates(ybar, p, W, ProjectionMode::fe);
  CHECK(post.coefficients(1) == doctest::Approx(rho * fe.coefficients(1)).epsilon(1e-10));
  CHECK(post.coefficients(2) == doctest::Approx(rho * fe.coefficients(2)).epsilon(1e-10));

  FeParams full = p;
  full.var_eps = 0.0;
  const auto a1 = project_on_covariates(ybar, full, W, ProjectionMode::posterior);
  const auto a2 = project_on_covariates(ybar, full, W, ProjectionMode::fe);
  CHECK((a1.coefficients - a2.coefficients).norm() < 1e-12);

  Eigen::MatrixXd bad(300, 2);
  bad.col(0).setOnes();
  bad.col(1).setConstant(2.0);
  CHECK_THROWS_AS(project_on_covariates(ybar, p, bad, ProjectionMode::fe), ValidationError);
}

TEST_CASE("posterior projection slope on an independent covariate is centred at zero") {
  std::vector<double> slopes;
  for (int r = 0; r < 50; ++r) {
    stats::RngStream rng(12, r);
    const auto panel = simulate_panel(5000, 3, stats::Normal{0, 1}, 1.0, rng);
    Eigen::MatrixXd W(5000, 2);
    for (int i = 0; i < 5000; ++i) W.row(i) << 1.0, rng.normal();
    slopes.push_back(project_on_covariates(panel.unit_means(), estimate_params(panel), W, ProjectionMode::posterior)
                         .coefficients(1));
  }
  CHECK(std::fabs(stats::mean(slopes)) < 3 * std::sqrt(stats::sample_variance(slopes) / slopes.size()));
}

TEST_CASE("skewness estimators") {
  const auto sym = vec({-2, -1, 0, 1, 2});
  FeParams p{0.0, 1.0, 1.0, 2};
  CHECK(std::fabs(skewness_posterior(sym, p)) < 1e-15);
  CHECK(skewness_model(p) == 0.0);

  // closed form vs averaging E[alpha^3 | Y] from the normal posterior
  stats::RngStream rng(13, 0);
  const auto panel = simulate_panel(400, 4, stats::SkewNormal{0.3, 1.2, 0.9}, 1.0, rng);
  const auto ybar = panel.unit_means();
  const auto q = estimate_params(panel);
  REQUIRE_FALSE(q.truncated);
  const double v = q.var_alpha * (1 - q.shrinkage());
  double acc = 0;
  for (Eigen::Index i = 0; i < ybar.size(); ++i) {
    const double m = q.posterior_mean(ybar(i));
    acc += m * m * m + 3 * m * v;
  }
  const double s = q.sd_alpha(), mu = q.mu_alpha;
  const double oracle = acc / ybar.size() / (s * s * s) - 3 * mu / s - std::pow(mu / s, 3);
  CHECK(skewness_posterior(ybar, q) == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("posterior skewness is close to the truth for large J") {
  const auto sn = stats::standardized_skew_normal(stats::skew_normal_delta_for_skewness(0.47));
  std::vector<double> est;
  for (int r = 0; r < 100; ++r) {
    stats::RngStream rng(14, r);
    const auto panel = simulate_panel(1000, 30, sn, 1.0, rng);
    est.push_back(skewness_posterior(panel.unit_means(), estimate_params(panel)));
  }
  const double m = stats::mean(est);
  CHECK(m >= 0.35);
  CHECK(m <= 0.50);
}

TEST_CASE("gini of the fitted normal") {
  // 2 Phi(1/sqrt 2) - 1 = erf(1/2) from its Maclaurin series
  double term = 0.5, erf = 0.5;
  for (int n = 1; n < 60; ++n) {
    term *= -0.25 / n;
    erf += term / (2 * n + 1);
  }
  erf *= 2 / std::sqrt(std::numbers::pi);
  FeParams p{0.7, 1.0, 1.0, 1};
  CHECK(std::fabs(gini_model(p) - erf) < 1e-13);
  CHECK(std::fabs(gini_model(p) - 0.520500) < 5e-7);
}

TEST_CASE("gini gradient is the Gateaux derivative of the Gini functional") {
  // G((1-t) f + t g) for f = N(mu, s^2) and g = N(m, v) by numerical integration
  FeParams p{0.2, 0.8, 1.0, 1};
  const double m = 0.9, v = 0.3;
  const auto gini_mix = [&](double t) {
    const auto dens = [&](double a) {
      return (1 - t) * stats::normal_pdf((a - p.mu_alpha) / p.sd_alpha()) / p.sd_alpha() +
             t * stats::normal_pdf((a - m) / std::sqrt(v)) / std::sqrt(v);
    };
    const auto cdf = [&](double a) {
      return (1 - t) * stats::normal_cdf((a - p.mu_alpha) / p.sd_alpha()) +
             t * stats::normal_cdf((a - m) / std::sqrt(v));
    };
    return gini_from_cdf(cdf, dens, -14, 14);
  };
  const double t = 1e-4;
  const double fd = (gini_mix(t) - gini_mix(-t)) / (2 * t);
  const auto grad = [&](double a) { return gini_gradient(p, a); };
  const double analytic = stats::normal_expectation(grad, m, std::sqrt(v), 96) -
                          stats::normal_expectation(grad, p.mu_alpha, p.sd_alpha(), 96);
  CHECK(fd == doctest::Approx(analytic).epsilon(1e-5));
  CHECK(gini_mix(0) == doctest::Approx(gini_model(p)).epsilon(1e-10));
}

TEST_CASE("posterior Gini correction is centred under the reference model") {
  stats::RngStream rng(15, 0);
  const auto panel = simulate_panel(20000, 3, stats::Normal{0, 1}, 1.0, rng);
  const auto ybar = panel.unit_means();
  const auto p = estimate_params(panel);
  const auto res = gini_posterior(ybar, p);
  CHECK(res.warnings.empty());
  // standard error of the averaged correction summands
  std::vector<double> terms(ybar.size());
  for (Eigen::Index i = 0; i < ybar.size(); ++i)
    terms[i] = stats::normal_expectation([&](double a) { return gini_gradient(p, a); }, p.posterior_mean(ybar(i)),
                                         p.posterior_sd(), 64);
  const double se = std::sqrt(stats::sample_variance(terms) / terms.size());
  CHECK(std::fabs(res.value - gini_model(p)) < 3 * se);
}

TEST_CASE("posterior Gini beats the model-based one under skewness at J = 30") {
  const auto sn = stats::standardized_skew_normal(stats::skew_normal_delta_for_skewness(0.47));
  const auto dens = [&](double a) {
    const double z = (a - sn.location) / sn.scale;
    const double shape = sn.delta / std::sqrt(1 - sn.delta * sn.delta);
    return 2 / sn.scale * stats::normal_pdf(z) * stats::normal_cdf(shape * z);
  };
  const double truth = gini_from_density(dens, -10, 10, 400000);
  double err_p = 0, err_m = 0;
  for (int r = 0; r < 100; ++r) {
    stats::RngStream rng(16, r);
    const auto panel = simulate_panel(1000, 30, sn, 1.0, rng);
    const auto p = estimate_params(panel);
    err_p += std::fabs(gini_posterior(panel.unit_means(), p).value - truth);
    err_m += std::fabs(gini_model(p) - truth);
  }
  CHECK(err_p < err_m);
}

TEST_CASE("neighborhood decomposition and posterior density") {
  SummaryEffects s;
  const int n = 5;
  s.effect = Eigen::VectorXd::Zero(n);
  s.noise_var = Eigen::VectorXd::Constant(n, 0.047);
  s.weight = Eigen::VectorXd::Ones(n);
  const double var_mu = 0.030;
  const double rho = var_mu / (var_mu + 0.047);
  const std::vector<double> grid = {-0.3, -0.1, 0.0, 0.05, 0.2};
  const auto d = posterior_density_hetero(s, var_mu, grid);
  const double sd = std::sqrt(var_mu * (1 - rho));
  for (std::size_t g = 0; g < grid.size(); ++g)
    CHECK(d[g] == doctest::Approx(stats::normal_pdf(grid[g] / sd) / sd).epsilon(1e-14));
  CHECK_THROWS_AS(posterior_density_hetero(s, 0.0, grid), ValidationError);
}

TEST_CASE("posterior density integrates to one and has the implied variance") {
  stats::RngStream rng(17, 0);
  const auto s = simulate_summary(2000, 0.03, 0.047, 1.0, rng);
  const auto fit = fit_neighborhood(s, {0.0, false});
  const double var_mu = fit.decomposition.var_signal;
  const double rho = fit.decomposition.shrinkage;
  for (auto mode : {NoiseMode::common, NoiseMode::per_unit}) {
    std::vector<double> grid;
    for (double a = -3; a <= 3; a += 0.001) grid.push_back(a);
    const auto dens = posterior_density_hetero(s, var_mu, grid, mode);
    double mass = 0, m1 = 0, m2 = 0;
    for (std::size_t g = 1; g < grid.size(); ++g) {
      const double h = grid[g] - grid[g - 1];
      mass += 0.5 * (dens[g] + dens[g - 1]) * h;
      m1 += 0.5 * (dens[g] * grid[g] + dens[g - 1] * grid[g - 1]) * h;
      m2 += 0.5 * (dens[g] * grid[g] * grid[g] + dens[g - 1] * grid[g - 1] * grid[g - 1]) * h;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
    const auto mom = posterior_density_moments(s, var_mu, mode);
    CHECK(m2 - m1 * m1 == doctest::Approx(mom.variance).epsilon(1e-5));
    if (mode == NoiseMode::common) {
      const Eigen::VectorXd& w = s.weight;
      const double wm = s.effect.dot(w) / w.sum();
      const double wv = (s.effect.array() - wm).square().matrix().dot(w) / w.sum();
      CHECK(mom.variance == doctest::Approx((1 - rho) * var_mu + rho * rho * wv).epsilon(1e-12));
    }
  }
}

TEST_CASE("neighborhood fit reproduces the footnote arithmetic") {
  // effects with weighted variance .077 and mean noise .047
  SummaryEffects s;
  s.effect = vec({-std::sqrt(0.077), std::sqrt(0.077)});
  s.noise_var = vec({0.047, 0.047});
  s.weight = vec({1, 1});
  const auto fit = fit_neighborhood(s, {0.0, false});
  CHECK(fit.decomposition.var_signal == doctest::Approx(0.030).epsilon(1e-12));
  CHECK(std::fabs(fit.var_posterior_means - 0.011) < 0.001);
  CHECK(std::fabs(fit.var_posterior_average - 0.030) < 1e-12);
}

TEST_CASE("trimming drops the noisiest units") {
  stats::RngStream rng(18, 0);
  const auto s = simulate_summary(1000, 0.03, 0.047, 0.0, rng);
  const auto fit = fit_neighborhood(s, {0.01, false});
  CHECK(fit.trimmed == 10);
  const auto pw = fit_neighborhood(s, {0.01, true});
  CHECK(pw.trimmed == 0);
}

TEST_CASE("correlated random effects") {
  stats::RngStream rng(19, 0);
  const int n = 3000;
  SummaryEffects s;
  s.effect.resize(n);
  s.noise_var = Eigen::VectorXd::Constant(n, 0.02);
  s.weight = Eigen::VectorXd::Ones(n);
  Eigen::MatrixXd W(n, 2);
  for (int i = 0; i < n; ++i) {
    const double w = rng.normal();
    W.row(i) << 1.0, w;
    s.effect(i) = 0.1 + 0.5 * w + std::sqrt(0.03) * rng.normal() + std::sqrt(0.02) * rng.normal();
  }
  const auto fit = fit_correlated_random_effects(s, W);
  CHECK(fit.theta(1) == doctest::Approx(0.5).epsilon(0.03));
  CHECK(fit.decomposition.var_signal == doctest::Approx(0.03).epsilon(0.1));
  const auto m = posterior_density_moments(s, fit.decomposition.var_signal, NoiseMode::common, &fit.prior_mean);
  CHECK(m.mean == doctest::Approx(s.effect.mean()).epsilon(1e-10));
}

TEST_CASE("summary CSV round trip and validation") {
  std::stringstream ss("unit_id,effect,noise_var,weight\na,0.1,0.02,1\nb,-0.2,0.03,2\n");
  const auto s = read_summary_csv(ss);
  CHECK(s.size() == 2);
  CHECK(s.effect(1) == -0.2);
  std::stringstream out;
  write_summary_csv(out, s);
  const auto t = read_summary_csv(out);
  CHECK(t.weight(1) == 2.0);
  std::stringstream bad("unit_id,effect,noise_var,weight\na,0.1,-0.02,1\nb,0,0,1\n");
  CHECK_THROWS_AS(read_summary_csv(bad), ValidationError);
  std::stringstream nonnum("unit_id,effect,noise_var,weight\na,x,0.02,1\nb,0,0,1\n");
  CHECK_THROWS_AS(read_summary_csv(nonnum), ValidationError);
}

TEST_CASE("panel CSV must be rectangular") {
  std::stringstream ok("unit_id,j,y\n1,1,0.5\n1,2,0.7\n2,1,1.0\n2,2,1.5\n");
  const auto p = read_panel_csv(ok);
  CHECK(p.units() == 2);
  CHECK(p.periods() == 2);
  CHECK(p.y(1, 1) == 1.5);
  std::stringstream ragged("unit_id,j,y\n1,1,0.5\n1,2,0.7\n2,1,1.0\n");
  CHECK_THROWS_AS(read_panel_csv(ragged), ValidationError);
}
