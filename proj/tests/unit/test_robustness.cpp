#include <cmath>
#include <numbers>

#include "doctest.h"
#include "robpost/error.hpp"
#include "robpost/fixed_effects/estimators.hpp"
#include "robpost/fixed_effects/simulate.hpp"
#include "robpost/framework/models.hpp"
#include "robpost/framework/posterior.hpp"
#include "robpost/robustness/divergence.hpp"
#include "robpost/robustness/inference.hpp"
#include "robpost/robustness/local.hpp"
#include "robpost/stats/normal.hpp"
#include "robpost/stats/quadrature.hpp"
#include "robpost/stats/distributions.hpp"

using namespace robpost;

namespace {

fe::FeParams fe_params(double mu, double va, double ve, int J) {
  fe::FeParams p;
  p.mu_alpha = mu;
  p.var_alpha = va;
  p.var_eps = ve;
  p.J = J;
  return p;
}

Vector vec1(double a) { return Vector::Constant(1, a); }

// Two independent standard normals; only the first is observed.
class HiddenNoiseModel final : public ReferenceModel {
 public:
  std::string key() const override { return "hidden_noise"; }
  Vector parameters() const override { return Vector(0); }
  ModelPtr with_parameters(const Vector&) const override { return std::make_shared<HiddenNoiseModel>(); }
  Vector draw_latent(const Vector&, stats::RngStream& rng) const override {
    Vector u(2);
    u << rng.normal(), rng.normal();
    return u;
  }
  double log_density(const Vector& u, const Vector&) const override {
    return -std::log(2 * std::numbers::pi) - 0.5 * u.squaredNorm();
  }
  Vector outcome(const Vector& u, const Vector&) const override { return vec1(u(0)); }
  Vector moments(const Vector& y, const Vector&) const override { return vec1(y(0)); }
  std::optional<double> posterior_expectation(const LatentMap& h, const Vector& y, const Vector& x) const override {
    Vector u(2);
    u(0) = y(0);
    return stats::normal_expectation([&](double b) { u(1) = b; return h(u, x); }, 0.0, 1.0);
  }
};

// Independent oracle: E over Ybar of Phi(z)(1 - Phi(z)), the within-Y variance
// of the indicator target, by Gauss-Hermite over the marginal of Ybar.
double indicator_within_variance(const fe::FeParams& p, double a) {
  const double sd_y = std::sqrt(p.var_alpha + p.noise_var());
  const double rho = p.var_alpha / (p.var_alpha + p.noise_var());
  const double s = std::sqrt(p.var_alpha * (1 - rho));
  return stats::normal_expectation(
      [&](double y) {
        const double q = stats::normal_cdf((a - p.mu_alpha - rho * (y - p.mu_alpha)) / s);
        return q * (1 - q);
      },
      p.mu_alpha, sd_y, 200);
}

}  // namespace

TEST_CASE("divergence normalizations and tilting maps") {
  std::vector<DivergenceSpec> specs{DivergenceSpec::parse("chi2"), DivergenceSpec::parse("kl"),
                                    DivergenceSpec::parse("hellinger"), DivergenceSpec::parse("cressie_read:0.5"),
                                    DivergenceSpec::parse("cressie_read:-0.5"), DivergenceSpec::parse("kl,nu=0.3"),
                                    DivergenceSpec::parse("chi2,nu=1")};
  for (const auto& d : specs) {
    CAPTURE(d.name());
    CHECK(d.phi(1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(d.phi_prime(1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    const double h = 1e-4;
    const double second = (d.phi(1 + h) - 2 * d.phi(1) + d.phi(1 - h)) / (h * h);
    CHECK(d.curvature() == doctest::Approx(second).epsilon(1e-5));
    for (double t : {-1.5, -0.3, 0.0, 0.4, 0.9}) {
      const double r = d.ratio_at(t);
      if (r > 0.0 && std::isfinite(r)) CHECK(d.phi_prime(r) == doctest::Approx(t).scale(1.0).epsilon(1e-10));
      // Conjugate against a brute-force supremum over a fine grid.
      double best = -INFINITY;
      for (int k = 0; k <= 200000; ++k) {
        const double rr = 1e-4 * k;
        best = std::max(best, t * rr - d.phi(rr));
      }
      if (std::isfinite(r) && r < 15.0) CHECK(d.conjugate(t) == doctest::Approx(best).epsilon(1e-6).scale(1.0));
    }
  }
  CHECK(DivergenceSpec::parse("chi2").curvature() == 2.0);
  CHECK(DivergenceSpec::parse("kl").curvature() == 1.0);
  CHECK(DivergenceSpec::parse("chi2").ratio_at(-3.0) == 0.0);
  CHECK(DivergenceSpec::parse("cressie_read:0.5,nu=0.2").name() == "cressie_read:0.5,nu=0.2");
  CHECK_THROWS_AS(DivergenceSpec::parse("tv"), ValidationError);
  CHECK_THROWS_AS(DivergenceSpec::parse("cressie_read:0"), ValidationError);
  CHECK_THROWS_AS(DivergenceSpec::parse("kl,nu=-1"), ValidationError);
}

TEST_CASE("posterior mean has zero leading bias and zero projection coefficient") {
  const auto p = fe_params(0.0, 1.0, 2.0, 3);
  const auto model = std::make_shared<FixedEffectsModel>(p);
  stats::RngStream rng(1);
  const ReferenceSimulation sim(*model, {Vector(0)}, 100000, rng);
  const Target t = fe_indicator_target(0.3);
  const auto gp = posterior_mean_map(*model, t);
  for (const auto& div : {DivergenceSpec::parse("chi2"), DivergenceSpec::parse("kl")}) {
    const BiasReport rep = local_bias(sim, *model, gp, t, div, {0.0, 1e-3});
    CHECK(rep.leading < 3 * rep.leading_se);
    // Each lambda component is within a few standard errors of zero.
    const Eigen::MatrixXd& psi = sim.centered_moments();
    for (Eigen::Index k = 0; k < rep.lambda.size(); ++k) {
      const double sd_psi = std::sqrt(psi.col(k).squaredNorm() / psi.rows());
      CHECK(std::abs(rep.lambda(k)) * sd_psi < 4 * rep.slope * std::sqrt(div.curvature() / 2) / std::sqrt(1e5));
    }
    // Slope equals the within-(Y,X) standard deviation scaled by sqrt(2/phi'').
    const double oracle = std::sqrt(2.0 / div.curvature() * indicator_within_variance(p, 0.3));
    CHECK(rep.slope == doctest::Approx(oracle).epsilon(0.01));
    CHECK(std::abs(rep.slope - oracle) < 4 * rep.slope_se);
    CHECK(rep.envelope[0] == rep.leading);
    CHECK(rep.envelope[1] == doctest::Approx(rep.leading + std::sqrt(1e-3) * rep.slope));
  }
}

TEST_CASE("measurable target has zero slope") {
  const auto model = std::make_shared<FixedEffectsModel>(fe_params(0.0, 1.0, 1.0, 1));
  stats::RngStream rng(2);
  const ReferenceSimulation sim(*model, {Vector(0)}, 5000, rng);
  const Target t = make_target("ybar^3", [](const Vector& u, const Vector&) { return std::pow(u(0) + u(1), 3); });
  const BiasReport rep =
      local_bias(sim, *model, [](const Vector& y, const Vector&) { return std::pow(y(0), 3); }, t,
                 DivergenceSpec{}, {0.01});
  CHECK(rep.leading == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK(rep.slope < 1e-6);
}

TEST_CASE("slope is invariant to adding a centered function of the covariates") {
  Eigen::VectorXd beta(2);
  beta << 0.5, 1.0;
  const auto model = std::make_shared<LinearRegressionModel>(beta, 1.0);
  std::vector<Vector> xs;
  for (int k = 0; k < 5; ++k) {
    Vector x(2);
    x << 1.0, k - 2.0;
    xs.push_back(x);
  }
  stats::RngStream rng(3);
  const ReferenceSimulation sim(*model, xs, 50000, rng);
  const Target t = make_target("1{u<0.3}", [](const Vector& u, const Vector&) { return u(0) < 0.3 ? 1.0 : 0.0; });
  const OutcomeMap base = [&](const Vector& y, const Vector& x) { return 0.2 * std::tanh(y(0) - x(1)); };
  const BiasReport ref = local_bias(sim, *model, base, t, DivergenceSpec{}, {});
  stats::RngStream wr(4);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> w(5);
    double mean = 0.0;
    for (auto& v : w) mean += (v = wr.normal()) / 5.0;
    for (auto& v : w) v -= mean;
    const OutcomeMap shifted = [&](const Vector& y, const Vector& x) {
      return base(y, x) + w[static_cast<std::size_t>(x(1) + 2.0)];
    };
    const BiasReport rep = local_bias(sim, *model, shifted, t, DivergenceSpec{}, {});
    CHECK(rep.slope == doctest::Approx(ref.slope).epsilon(1e-10));
    CHECK(rep.leading == doctest::Approx(ref.leading).epsilon(1e-8));
  }
}

TEST_CASE("posterior mean minimizes the local expansion among perturbed estimators") {
  const auto p = fe_params(0.0, 1.0, 1.0, 2);
  const auto model = std::make_shared<FixedEffectsModel>(p);
  stats::RngStream rng(5);
  const ReferenceSimulation sim(*model, {Vector(0)}, 50000, rng);
  const Target t = fe_indicator_target(-0.2);
  const auto gp = posterior_mean_map(*model, t);
  const double eps = 1e-4;
  const BiasReport best = local_bias(sim, *model, gp, t, DivergenceSpec{}, {eps});
  const std::vector<std::function<double(double)>> directions{
      [](double y) { return std::sin(y); }, [](double y) { return y * y - 1.0; },
      [](double y) { return y > 0 ? 1.0 : 0.0; }, [](double y) { return std::exp(-y * y); },
      [](double y) { return std::tanh(3 * y); }};
  for (const auto& eta : directions)
    for (double step : {0.05, -0.02}) {
      const OutcomeMap g = [&](const Vector& y, const Vector& x) { return gp(y, x) + step * eta(y(0)); };
      const BiasReport rep = local_bias(sim, *model, g, t, DivergenceSpec{}, {eps});
      // The leading term of the posterior mean is zero in population; allow its MC error.
      CHECK(best.envelope[0] <= rep.envelope[0] + 3 * best.leading_se);
      CHECK(best.slope <= rep.slope + 1e-12);
    }
}

TEST_CASE("informativeness: measurable and independent targets, complement identity") {
  const auto model = std::make_shared<FixedEffectsModel>(fe_params(0.0, 1.0, 1.0, 1));
  stats::RngStream rng(6);
  const ReferenceSimulation sim(*model, {Vector(0)}, 20000, rng);
  const Target cube = make_target("ybar^3", [](const Vector& u, const Vector&) { return std::pow(u(0) + u(1), 3); });
  const Informativeness full = informativeness(sim, *model, cube, PosteriorLaw::closed_form(model, cube));
  CHECK(full.r2 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(full.ratio < 1e-6);

  const auto hidden = std::make_shared<HiddenNoiseModel>();
  stats::RngStream rng2(7);
  const ReferenceSimulation sim2(*hidden, {Vector(0)}, 20000, rng2);
  const Target b = make_target("b", [](const Vector& u, const Vector&) { return u(1) * u(1) + u(1); });
  const Informativeness none = informativeness(sim2, *hidden, b, PosteriorLaw::closed_form(hidden, b));
  // Zero in population; the sample projection on (1, psi) leaves O(1/S) noise.
  CHECK(none.r2 < 1e-3);
  CHECK(none.ratio == doctest::Approx(1.0).epsilon(1e-3));

  const Target ind = fe_indicator_target(0.5);
  const Informativeness mid = informativeness(sim, *model, ind, PosteriorLaw::closed_form(model, ind));
  CHECK(mid.r2 > 0.0);
  CHECK(mid.r2 < 1.0);
  CHECK(std::abs(mid.ratio * mid.ratio + mid.r2 - 1.0) < 2 * mid.r2_se);
  CHECK(mid.r2_se > 0.0);
  CHECK(bias_ratio(sim, *model, ind, PosteriorLaw::closed_form(model, ind)) == mid.ratio);

  const Target lin = make_target("ybar", [](const Vector& u, const Vector&) { return u(0) + u(1); });
  CHECK_THROWS_AS(informativeness(sim, *model, lin, PosteriorLaw::closed_form(model, lin)), ValidationError);
}

TEST_CASE("bias-aware interval arithmetic") {
  const Interval a = bias_aware_ci(0.0, 0.5, 1.0, 400, 0.01);
  CHECK(a.half_width == doctest::Approx(0.05 + 1.959963984540054 / 20.0).epsilon(1e-12));
  CHECK(a.half_width == doctest::Approx(0.148).epsilon(1e-3));
  const Interval w = bias_aware_ci(1.0, 0.7, 4.0, 100, 0.0);
  CHECK(w.lower == doctest::Approx(1.0 - 1.959963984540054 * 0.2).epsilon(1e-12));
  CHECK(bias_aware_ci(1.0, 0.0, 4.0, 100, 0.3).half_width == w.half_width);
  CHECK_THROWS_AS(bias_aware_ci(0.0, -1.0, 1.0, 10, 0.1), ValidationError);
}

TEST_CASE("asymptotic variance without estimation effect is the sampling variance") {
  const auto model = std::make_shared<LinearRegressionModel>(vec1(0.5), 1.0);
  stats::RngStream rng(8);
  const ReferenceSimulation sim(*model, {vec1(1.0)}, 200000, rng);
  Target t = make_target("y^2", [](const Vector& u, const Vector&) { return std::pow(0.5 + u(0), 2); });
  t.model_mean = [](const ReferenceModel&, const Vector&) { return 1.25; };
  const Sample data{{vec1(0.3), vec1(1.0)}, {vec1(1.1), vec1(1.0)}};
  const AsymptoticVariance av = asymptotic_variance(*model, data, t, sim);
  CHECK(av.sigma(1, 1) == doctest::Approx(3.0).epsilon(0.05));
  CHECK(av.sigma(0, 1) == av.sigma(1, 0));
  CHECK(av.sigma(0, 0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("posterior variance formula matches Monte Carlo spread of the estimator") {
  const auto truth = fe_params(0.0, 1.0, 2.0, 4);
  const auto model = std::make_shared<FixedEffectsModel>(truth);
  const Target t = fe_indicator_target(0.4);
  const std::size_t n = 1000;
  stats::RngStream sim_rng(9);
  const ReferenceSimulation sim(*model, {Vector(0)}, 100000, sim_rng);
  stats::RngStream base(10);
  const auto first = fe::simulate_panel(n, 4, stats::Normal{0.0, 1.0}, 2.0, base);
  const AsymptoticVariance av = asymptotic_variance(*model, fe_observations(first), t, sim);
  CHECK(av.warnings.empty());
  std::vector<double> est;
  for (std::uint64_t r = 0; r < 500; ++r) {
    stats::RngStream rng = base.split(r + 1);
    const auto panel = fe::simulate_panel(n, 4, stats::Normal{0.0, 1.0}, 2.0, rng);
    const auto fitted = std::make_shared<FixedEffectsModel>(fe::estimate_params(panel));
    est.push_back(posterior_average_estimate(PosteriorLaw::closed_form(fitted, t), fe_observations(panel)).value);
  }
  double m = 0.0, v = 0.0;
  for (double e : est) m += e / est.size();
  for (double e : est) v += (e - m) * (e - m) / (est.size() - 1);
  CHECK(v == doctest::Approx(av.sigma(1, 1) / n).epsilon(0.2));
}

TEST_CASE("specification test: null point, size, power and scale invariance") {
  const auto truth = fe_params(0.0, 1.0, 2.0, 4);
  const std::size_t n = 1000;
  {
    const auto model = std::make_shared<FixedEffectsModel>(truth);
    Target c = make_target("c", [](const Vector&, const Vector&) { return 1.0; });
    c.posterior_mean = [](const ReferenceModel&, const Vector&, const Vector&) { return 1.0; };
    c.model_mean = [](const ReferenceModel&, const Vector&) { return 1.0; };
    stats::RngStream rng(11);
    const Sample data = fe_observations(fe::simulate_panel(50, 4, stats::Normal{0.0, 1.0}, 2.0, rng));
    const SpecificationTest st = specification_test(*model, data, c, 1000, rng);
    CHECK(st.statistic == 0.0);
    CHECK(st.p_value == 1.0);
  }
  const Target t = fe_indicator_target(0.0);
  auto rejection_rate = [&](const stats::Distribution& alpha, int reps, std::uint64_t seed) {
    int rejected = 0;
    stats::RngStream base(seed);
    for (int r = 0; r < reps; ++r) {
      stats::RngStream rng = base.split(static_cast<std::uint64_t>(r));
      const auto panel = fe::simulate_panel(n, 4, alpha, 2.0, rng);
      const auto model = std::make_shared<FixedEffectsModel>(fe::estimate_params(panel));
      if (specification_test(*model, fe_observations(panel), t, 20000, rng).p_value < 0.05) ++rejected;
    }
    return static_cast<double>(rejected) / reps;
  };
  const double size = rejection_rate(stats::Normal{0.0, 1.0}, 200, 12);
  CHECK(size >= 0.01);
  CHECK(size <= 0.10);
  const double power = rejection_rate(stats::Chi2Recentered{1.0}, 100, 13);
  CHECK(power > 0.5);

  // Affine rescaling of the target leaves the statistic unchanged.
  stats::RngStream rng(14);
  const auto panel = fe::simulate_panel(n, 4, stats::Chi2Recentered{2.0}, 2.0, rng);
  const auto model = std::make_shared<FixedEffectsModel>(fe::estimate_params(panel));
  Target scaled;
  scaled.name = "3 - 2 cdf";
  scaled.delta = [t](const ReferenceModel& m, const Vector& u, const Vector& x) { return 3 - 2 * t.delta(m, u, x); };
  scaled.posterior_mean = [t](const ReferenceModel& m, const Vector& y, const Vector& x) {
    return 3 - 2 * t.posterior_mean(m, y, x);
  };
  scaled.model_mean = [t](const ReferenceModel& m, const Vector& x) { return 3 - 2 * t.model_mean(m, x); };
  const Sample data = fe_observations(panel);
  stats::RngStream r1(15), r2(15);
  const double s1 = specification_test(*model, data, t, 20000, r1).statistic;
  const double s2 = specification_test(*model, data, scaled, 20000, r2).statistic;
  CHECK(s1 > 0.0);
  CHECK(s2 == doctest::Approx(s1).epsilon(1e-6));
}

TEST_CASE("prediction error expansion") {
  const auto p = fe_params(0.0, 1.0, 2.0, 3);
  const auto model = std::make_shared<FixedEffectsModel>(p);
  stats::RngStream rng(16);
  const ReferenceSimulation sim(*model, {Vector(0)}, 50000, rng);
  const Target level = fe_level_target();
  const auto law = PosteriorLaw::closed_form(model, level);
  const PredictionErrorReport rep =
      prediction_error_expansion(sim, *model, posterior_mean_map(*model, level), level, law, DivergenceSpec{});
  CHECK(rep.zero_posterior_skewness);
  CHECK(std::abs(rep.leading - p.var_alpha * (1 - p.shrinkage())) < 3 * rep.leading_se);
  CHECK(rep.slope > 0.0);

  const Target y = make_target("ybar", [](const Vector& u, const Vector&) { return u(0) + u(1); });
  const PredictionErrorReport zero = prediction_error_expansion(
      sim, *model, [](const Vector& yy, const Vector&) { return yy(0); }, y, PosteriorLaw::closed_form(model, y),
      DivergenceSpec{});
  CHECK(zero.leading < 1e-20);
  CHECK(zero.slope < 1e-10);

  // A skewed posterior: delta = exp(alpha).
  const Target ex = make_target("exp", [](const Vector& u, const Vector&) { return std::exp(u(0)); });
  const auto ex_law = PosteriorLaw::closed_form(model, ex);
  const PredictionErrorReport skew = prediction_error_expansion(
      sim, *model, [&](const Vector& yy, const Vector& x) { return ex_law(yy, x); }, ex, ex_law, DivergenceSpec{});
  CHECK_FALSE(skew.zero_posterior_skewness);
}

TEST_CASE("bias report serializes to JSON") {
  BiasReport rep;
  rep.leading = 0.1;
  rep.slope = 0.5;
  rep.lambda = Eigen::VectorXd::Constant(2, 0.25);
  rep.epsilon = {0.0, 0.01};
  rep.envelope = {0.1, 0.15};
  const std::string j = bias_report_json(rep);
  for (const char* key : {"\"leading\"", "\"slope\"", "\"lambda\"", "\"epsilon\"", "\"envelope\"", "\"mc_se\""})
    CHECK(j.find(key) != std::string::npos);
}
