#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "robpost/error.hpp"
#include "robpost/finite_support/instance.hpp"
#include "robpost/finite_support/worst_case.hpp"
#include "robpost/stats/normal.hpp"

using namespace robpost;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

fs::DiscreteInstance make_instance(VectorXd w, std::vector<double> g, VectorXd delta, VectorXd counts,
                                   MatrixXd psi = MatrixXd()) {
  fs::DiscreteInstance inst;
  inst.ref_weights = std::move(w);
  inst.g_values = std::move(g);
  inst.delta = std::move(delta);
  inst.counts = std::move(counts);
  inst.psi = psi.size() == 0 ? MatrixXd(inst.ref_weights.size(), 0) : psi;
  inst.validate();
  return inst;
}

fs::DiscreteInstance instance_with_shape(std::size_t K, std::size_t L, std::uint64_t seed, bool with_moments) {
  for (std::uint64_t s = seed;; ++s) {
    stats::RngStream rng(s);
    auto inst = fs::random_instance(rng);
    if (inst.size() == K && inst.classes() == L && (inst.psi.cols() > 0) == with_moments) return inst;
  }
}

const std::vector<DivergenceSpec> kFamilies = {DivergenceSpec::parse("chi2"), DivergenceSpec::parse("kl"),
                                               DivergenceSpec::parse("hellinger"),
                                               DivergenceSpec::parse("cressie_read:0.5")};

}  // namespace

TEST_CASE("posterior reduction examples") {
  const VectorXd delta = Eigen::Vector3d(0.3, -0.6, 0.9);
  // Injective: any weights give the count-weighted average.
  for (double w1 : {0.1, 0.5, 0.8}) {
    auto inst = make_instance(Eigen::Vector2d(w1, 1.0 - w1), {0.0, 1.0}, delta.head(2), Eigen::Vector2d(3.0, 7.0));
    CHECK(fs::posterior_reduce(inst).estimate == doctest::Approx((3.0 * 0.3 + 7.0 * -0.6) / 10.0).epsilon(1e-14));
  }
  auto pooled = make_instance(Eigen::Vector2d(0.5, 0.5), {2.0, 2.0}, delta.head(2), VectorXd::Constant(1, 4.0));
  CHECK(fs::posterior_reduce(pooled).class_means(0) == doctest::Approx((0.3 - 0.6) / 2.0));
  auto three = make_instance(Eigen::Vector3d(0.2, 0.3, 0.5), {0.0, 1.0, 1.0}, delta, Eigen::Vector2d(1.0, 1.0));
  const auto red = fs::posterior_reduce(three);
  CHECK(red.class_means(0) == doctest::Approx(0.3));
  CHECK(red.class_means(1) == doctest::Approx((0.3 * -0.6 + 0.5 * 0.9) / 0.8).epsilon(1e-14));
}

TEST_CASE("Dirichlet posterior mean limits") {
  stats::RngStream rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    auto inst = fs::random_instance(rng);
    const double prior_mean = inst.ref_weights.dot(inst.delta);
    CHECK(std::abs(fs::dirichlet_posterior_mean(inst, 1e-8) - fs::posterior_reduce(inst).estimate) < 1e-6);
    CHECK(std::abs(fs::dirichlet_posterior_mean(inst, 1e12) - prior_mean) < 1e-9);
    auto empty = inst;
    empty.counts.setZero();
    CHECK(fs::dirichlet_posterior_mean(empty, 2.5) == doctest::Approx(prior_mean).epsilon(1e-12));
  }
  auto inst = fs::random_instance(rng);
  CHECK_THROWS_AS(fs::dirichlet_posterior_mean(inst, 0.0), ValidationError);
}

TEST_CASE("instance JSON round trip and validation") {
  stats::RngStream rng(3);
  const auto inst = instance_with_shape(4, 3, 5, true);
  const auto back = fs::DiscreteInstance::from_json(inst.to_json());
  CHECK(back.ref_weights.isApprox(inst.ref_weights, 1e-15));
  CHECK(back.delta == inst.delta);
  CHECK(back.psi == inst.psi);
  CHECK(back.g_values == inst.g_values);
  CHECK(back.counts == inst.counts);
  CHECK_THROWS_AS(fs::DiscreteInstance::from_json("{"), ValidationError);
  CHECK_THROWS_AS(fs::DiscreteInstance::from_json(R"({"ref_weights":[0.5,0.6],"g_values":[0,1],"delta":[0,1],"counts":[1,1]})"),
                  ValidationError);
  CHECK_THROWS_AS(fs::DiscreteInstance::from_json(R"({"ref_weights":[0.5,0.5],"g_values":[0,1],"delta":[0,1],"counts":[1]})"),
                  ValidationError);
}

TEST_CASE("zero radius gives the reference expectation") {
  stats::RngStream rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    auto inst = fs::random_instance(rng);
    VectorXd gamma(static_cast<Eigen::Index>(inst.classes()));
    for (auto& v : gamma) v = rng.normal();
    const VectorXd c = fs::expand(inst, gamma) - inst.delta;
    for (auto solver : {fs::Solver::dual_tilting, fs::Solver::primal_barrier}) {
      CHECK(fs::worst_case_bias(inst, gamma, kFamilies[0], 0.0, solver).bias ==
            doctest::Approx(std::abs(c.dot(inst.ref_weights))).epsilon(1e-14));
      CHECK(fs::worst_case_bias(inst, fs::posterior_reduce(inst).class_means, kFamilies[1], 0.0, solver).bias <
            1e-15);
    }
  }
}

TEST_CASE("dual and primal solvers agree and return feasible weights") {
  stats::RngStream rng(99);
  for (int rep = 0; rep < 25; ++rep) {
    auto inst = fs::random_instance(rng);
    VectorXd gamma(static_cast<Eigen::Index>(inst.classes()));
    for (auto& v : gamma) v = rng.uniform() * 2.0 - 1.0;
    const auto& div = kFamilies[static_cast<std::size_t>(rep) % kFamilies.size()];
    for (double eps : {1e-4, 0.05, 0.5, 5.0}) {
      CAPTURE(rep);
      CAPTURE(eps);
      CAPTURE(div.name());
      fs::WorstCaseSolution dual, primal;
      REQUIRE_NOTHROW(dual = fs::worst_case_bias(inst, gamma, div, eps, fs::Solver::dual_tilting));
      REQUIRE_NOTHROW(primal = fs::worst_case_bias(inst, gamma, div, eps, fs::Solver::primal_barrier));
      CHECK(std::abs(dual.upper - primal.upper) < 1e-5);
      CHECK(std::abs(dual.lower - primal.lower) < 1e-5);
      for (const VectorXd* f : {&dual.f0_upper, &dual.f0_lower, &primal.f0_upper, &primal.f0_lower}) {
        CHECK(f->minCoeff() >= 0.0);
        CHECK(std::abs(f->sum() - 1.0) < 1e-9);
        double d = 0.0;
        for (Eigen::Index k = 0; k < f->size(); ++k) d += inst.ref_weights(k) * div.phi((*f)(k) / inst.ref_weights(k));
        CHECK(d <= eps + 1e-9 + (f == &dual.f0_upper && dual.upper_detail.divergence_slack ? 1e-6 : 0.0) +
                       (f == &dual.f0_lower && dual.lower_detail.divergence_slack ? 1e-6 : 0.0));
        if (inst.psi.cols() > 0) CHECK((inst.psi.transpose() * *f).cwiseAbs().maxCoeff() <= 1e-7);
      }
    }
  }
}

TEST_CASE("chi-square worst case is an affine tilt in the interior") {
  const auto inst = instance_with_shape(5, 3, 40, true);
  VectorXd gamma = fs::posterior_reduce(inst).class_means.array() + 0.05;
  const auto sol = fs::worst_case_bias(inst, gamma, kFamilies[0], 1e-4);
  const VectorXd c = fs::expand(inst, gamma) - inst.delta;
  const VectorXd f = sol.f0_upper;
  REQUIRE(f.minCoeff() > 0.0);
  MatrixXd design(c.size(), 2 + inst.psi.cols());
  design.col(0).setOnes();
  design.col(1) = c;
  design.rightCols(inst.psi.cols()) = inst.psi;
  const VectorXd ratio = f.cwiseQuotient(inst.ref_weights);
  const VectorXd coef = design.colPivHouseholderQr().solve(ratio);
  CHECK((design * coef - ratio).cwiseAbs().maxCoeff() < 1e-10);
  // Exact value: reference mean plus sqrt(eps * residual variance).
  CHECK(sol.upper == doctest::Approx(c.dot(inst.ref_weights) + fs::local_slope(inst, gamma, kFamilies[0]) * 1e-2)
                         .epsilon(1e-10));
}

TEST_CASE("worst-case bias is nondecreasing in the radius") {
  stats::RngStream rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    auto inst = fs::random_instance(rng);
    const VectorXd gamma = fs::posterior_reduce(inst).class_means;
    for (const auto& div : kFamilies) {
      double prev = 0.0;
      for (double eps : {1e-6, 1e-4, 1e-2, 0.1, 1.0, 10.0, 1e3}) {
        const double b = fs::worst_case_bias(inst, gamma, div, eps).bias;
        CHECK(b >= prev - 1e-12);
        prev = b;
      }
    }
  }
}

TEST_CASE("binary-choice instance reaches the unconstrained worst case") {
  const double eta = 0.01;
  const auto inst = fs::binary_choice_instance(0.0, eta);
  const double p = stats::normal_cdf(eta);
  const VectorXd model = VectorXd::Constant(2, p);
  for (const auto& div : {kFamilies[0], kFamilies[1]}) {
    const auto sol = fs::worst_case_bias(inst, model, div, 1e4);
    CHECK(sol.upper_detail.divergence_slack);
    CHECK(sol.bias == doctest::Approx(std::max(p, 1.0 - p)).epsilon(1e-12));
    const double post = fs::worst_case_bias(inst, fs::posterior_reduce(inst).class_means, div, 1e4).bias;
    CHECK(post / sol.bias == doctest::Approx(2.0 * (1.0 - p) / p).epsilon(1e-9));
  }
  // Bias grows towards the limit.
  double prev = 0.0;
  for (double eps : {1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0, 1e4}) {
    const double b = fs::worst_case_bias(inst, model, kFamilies[0], eps).bias;
    CHECK(b >= prev - 1e-12);
    CHECK(b <= std::max(p, 1.0 - p) + 1e-12);
    prev = b;
  }
}

TEST_CASE("tilting function is 1 + t / phi''(1) to second order") {
  for (const auto& div : kFamilies) {
    double c = 0.0;
    for (int i = 1; i <= 100; ++i) {
      for (double sign : {-1.0, 1.0}) {
        const double t = sign * 0.001 * i;
        c = std::max(c, std::abs(div.ratio_at(t) - 1.0 - t / div.curvature()) / (t * t));
      }
    }
    CAPTURE(div.name());
    CHECK(c < 5.0);
    // Constant is stable as t shrinks.
    const double t = 1e-3;
    CHECK(std::abs(div.ratio_at(t) - 1.0 - t / div.curvature()) <= c * t * t + 1e-15);
  }
}

TEST_CASE("local optimality of the posterior mean") {
  const auto inst = instance_with_shape(5, 3, 100, true);
  const VectorXd post = fs::posterior_reduce(inst).class_means;
  const std::vector<double> eps{1e-6, 4e-6, 1.6e-5, 6.4e-5, 2.56e-4, 1.024e-3};
  stats::RngStream rng(5);
  std::vector<VectorXd> candidates{(post.array() + 0.1).matrix()};
  // Class perturbation in the span of the moment functions: zero reference mean.
  VectorXd span = VectorXd::Zero(post.size());
  const auto idx = inst.class_index();
  for (std::size_t k = 0; k < idx.size(); ++k) span(static_cast<Eigen::Index>(idx[k])) = inst.psi(static_cast<Eigen::Index>(k), 0);
  candidates.push_back(post + 0.3 * span);
  for (int j = 0; j < 18; ++j) {
    VectorXd g = post;
    for (auto& v : g) v += 0.2 * rng.normal();
    candidates.push_back(g);
  }
  for (const auto& div : {kFamilies[0], kFamilies[1]}) {
    const auto rep = fs::verify_theorem1(inst, div, eps, candidates);
    CHECK(std::abs(rep.fits[0].intercept) < 1e-6);
    CHECK(rep.fits[1].intercept == doctest::Approx(0.1).epsilon(1e-4));
    CHECK(std::abs(rep.fits[2].intercept - rep.fits[0].intercept) < 1e-6);
    CHECK(std::abs(rep.fits[2].slope - rep.fits[0].slope) < 1e-4);
    CHECK(rep.posterior_minimal);
    CHECK(rep.posterior_slope_rel_error < 0.01);
  }
}

TEST_CASE("global bias bound of the posterior mean") {
  SUBCASE("zero radius") {
    const auto inst = instance_with_shape(4, 2, 1, false);
    const auto rep = fs::verify_theorem2(inst, kFamilies[0], 0.0);
    CHECK(rep.ratio == 1.0);
  }
  SUBCASE("binary choice") {
    const auto inst = fs::binary_choice_instance(0.0, 0.01);
    const auto rep = fs::verify_theorem2(inst, kFamilies[0], 1e4);
    const double p = stats::normal_cdf(0.01);
    CHECK(rep.infimum == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(rep.ratio == doctest::Approx(4.0 * (1.0 - p)).epsilon(1e-6));
  }
  SUBCASE("random sweep") {
    stats::RngStream rng(2024);
    for (int rep = 0; rep < 6; ++rep) {
      auto inst = fs::random_instance(rng);
      for (double eps : {0.01, 1.0}) {
        const auto r = fs::verify_theorem2(inst, kFamilies[static_cast<std::size_t>(rep) % 2], eps, 3);
        CAPTURE(rep);
        CHECK(r.ratio <= 2.0 + 1e-6);
        CHECK(r.infimum <= r.posterior + 1e-12);
      }
    }
  }
}

TEST_CASE("global prediction bound of the posterior mean") {
  SUBCASE("zero radius") {
    stats::RngStream rng(8);
    auto inst = fs::random_instance(rng);
    CHECK(fs::verify_theorem3(inst, kFamilies[1], 0.0).ratio == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("deterministic effect") {
    auto inst = make_instance(Eigen::Vector3d(0.2, 0.3, 0.5), {0.0, 1.0, 1.0}, Eigen::Vector3d(0.4, -1.0, -1.0),
                              Eigen::Vector2d(2.0, 3.0));
    CHECK(fs::worst_case_mse(inst, fs::posterior_reduce(inst).class_means, kFamilies[0], 0.0).value < 1e-30);
  }
  SUBCASE("random sweep") {
    stats::RngStream rng(77);
    for (int rep = 0; rep < 6; ++rep) {
      auto inst = fs::random_instance(rng);
      const auto r = fs::verify_theorem3(inst, kFamilies[static_cast<std::size_t>(rep) % 2], 0.1, 4);
      CHECK(r.ratio <= 4.0 + 1e-6);
    }
  }
}

TEST_CASE("moment functions must be centred") {
  auto inst = instance_with_shape(4, 3, 9, true);
  inst.psi.array() += 1.0;
  CHECK_THROWS_AS(fs::worst_case_bias(inst, fs::posterior_reduce(inst).class_means, kFamilies[0], 0.1),
                  ValidationError);
}
