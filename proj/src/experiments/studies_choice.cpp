#include <Eigen/Core>
#include <cmath>

#include "robpost/choice/choice.hpp"
#include "robpost/choice/max_score.hpp"
#include "robpost/error.hpp"
#include "robpost/experiments/studies.hpp"
#include "robpost/finite_support/instance.hpp"
#include "robpost/finite_support/worst_case.hpp"
#include "robpost/stats/distributions.hpp"
#include "robpost/stats/normal.hpp"
#include "robpost/stats/parallel.hpp"

namespace robpost::exp {

OrderedAsfStudy ordered_asf_study(std::size_t categories, std::size_t n, int reps, std::uint64_t seed,
                                  unsigned threads, int grid_points) {
  require(categories >= 3, "ordered_asf_study: need at least three categories");
  require(reps >= 1 && grid_points >= 2, "ordered_asf_study: need replications and a grid");
  const auto R = static_cast<std::size_t>(reps);
  const auto G = static_cast<std::size_t>(grid_points);
  const stats::Distribution error = stats::Chi2Recentered{1.0};

  OrderedAsfStudy out;
  out.categories = categories;
  for (std::size_t k = 0; k < G; ++k) out.grid.push_back(-2.0 + 4.0 * static_cast<double>(k) / (G - 1.0));

  std::vector<std::vector<double>> truth(R), post(R), model(R);
  std::vector<int> redraws(R, 0);
  const stats::RngStream base(seed);
  stats::parallel_for(R, threads, [&](std::size_t r) {
    stats::RngStream rng = base.split(r);
    choice::ChoiceModelSpec dgp;
    dgp.beta = Eigen::Vector2d(0.0, 0.5);
    dgp.sigma = 1.0;
    choice::ChoiceData data;
    choice::OrderedScoreFit fit;
    // Designs with fewer than two identified thresholds are redrawn.
    for (int attempt = 0;; ++attempt) {
      if (attempt == 50) throw NumericalError("ordered_asf_study: no identified design after 50 draws");
      dgp.thresholds = choice::draw_thresholds(categories, rng);
      data = choice::simulate_choice(dgp, error, n, rng);
      try {
        fit = choice::ordered_max_score(data.y, data.x, dgp.thresholds);
      } catch (const IdentificationError&) {
        ++redraws[r];
        continue;
      }
      break;
    }
    choice::ChoiceModelSpec est;
    est.beta = fit.beta;
    est.thresholds = dgp.thresholds;
    est.sigma = choice::fit_ordered_sigma(est, data);

    Eigen::VectorXd x(1);
    for (double g : out.grid) {
      x(0) = g;
      truth[r].push_back(choice::ordered_asf_under(dgp, error, x));
      post[r].push_back(choice::ordered_asf(est, data, x, choice::AsfMode::posterior).value);
      model[r].push_back(choice::ordered_asf(est, choice::ChoiceData{}, x, choice::AsfMode::model).value);
    }
  });

  out.truth_mean.assign(G, 0.0);
  out.posterior_mean.assign(G, 0.0);
  out.model_mean.assign(G, 0.0);
  for (int d : redraws) out.redraws += d;
  for (std::size_t r = 0; r < R; ++r) {
    double mp = 0.0, mm = 0.0;
    for (std::size_t k = 0; k < G; ++k) {
      mp += std::abs(post[r][k] - truth[r][k]) / G;
      mm += std::abs(model[r][k] - truth[r][k]) / G;
      out.truth_mean[k] += truth[r][k] / R;
      out.posterior_mean[k] += post[r][k] / R;
      out.model_mean[k] += model[r][k] / R;
    }
    out.mad_posterior.push_back(mp);
    out.mad_model.push_back(mm);
    if (mp < mm) ++out.posterior_wins;
    out.mean_mad_posterior += mp / R;
    out.mean_mad_model += mm / R;
  }
  return out;
}

std::vector<BinaryRatioRow> binary_ratio_curve(const std::vector<double>& eta) {
  const DivergenceSpec div;  // chi-square
  const double radius = 1e4;  // large enough for the divergence bound to be slack
  std::vector<BinaryRatioRow> out;
  for (double e : eta) {
    require(e > 0.0, "binary_ratio_curve: target index must exceed the data index");
    BinaryRatioRow row;
    row.eta = e;
    row.closed_form = choice::worst_case_bias_closed_form(e, 0.0).ratio;
    const auto inst = fs::binary_choice_instance(0.0, e);
    const Eigen::VectorXd model = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(inst.classes()),
                                                            stats::normal_cdf(e));
    const Eigen::VectorXd post = fs::posterior_reduce(inst).class_means;
    const double bm = fs::worst_case_bias(inst, model, div, radius).bias;
    const double bp = fs::worst_case_bias(inst, post, div, radius).bias;
    row.solver_ratio = bp / bm;
    row.infimum_ratio = fs::verify_theorem2(inst, div, radius).ratio;
    out.push_back(row);
  }
  return out;
}

}  // namespace robpost::exp
