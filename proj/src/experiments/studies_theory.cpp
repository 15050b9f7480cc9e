#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

#include "robpost/error.hpp"
#include "robpost/experiments/studies.hpp"
#include "robpost/finite_support/instance.hpp"
#include "robpost/finite_support/worst_case.hpp"
#include "robpost/stats/parallel.hpp"

namespace robpost::exp {

namespace {

std::vector<fs::DiscreteInstance> draw_instances(int count, std::uint64_t seed) {
  stats::RngStream rng(seed);
  std::vector<fs::DiscreteInstance> out;
  for (int i = 0; i < count; ++i) out.push_back(fs::random_instance(rng));
  return out;
}

}  // namespace

TheoremSweep theorem_sweep(int instances, const std::vector<double>& epsilons, const DivergenceSpec& div,
                           std::uint64_t seed, unsigned threads) {
  require(instances >= 1 && !epsilons.empty(), "theorem_sweep: need instances and radii");
  const auto insts = draw_instances(instances, seed);
  const std::size_t E = epsilons.size();
  TheoremSweep out;
  out.rows.resize(insts.size() * E);
  stats::parallel_for(out.rows.size(), threads, [&](std::size_t k) {
    const std::size_t i = k / E;
    const double eps = epsilons[k % E];
    const auto& inst = insts[i];
    const Eigen::VectorXd post = fs::posterior_reduce(inst).class_means;
    SweepRow row;
    row.instance = static_cast<int>(i);
    row.epsilon = eps;
    row.bias_ratio = fs::verify_theorem2(inst, div, eps, seed + k).ratio;
    row.mse_ratio = fs::verify_theorem3(inst, div, eps, seed + k).ratio;
    const double dual = fs::worst_case_bias(inst, post, div, eps, fs::Solver::dual_tilting).bias;
    const double primal = fs::worst_case_bias(inst, post, div, eps, fs::Solver::primal_barrier).bias;
    row.solver_gap = std::abs(dual - primal);
    out.rows[k] = row;
  });
  for (const auto& r : out.rows) {
    out.max_bias_ratio = std::max(out.max_bias_ratio, r.bias_ratio);
    out.max_mse_ratio = std::max(out.max_mse_ratio, r.mse_ratio);
    out.max_solver_gap = std::max(out.max_solver_gap, r.solver_gap);
  }
  return out;
}

std::vector<LocalOptimalityRow> local_optimality_sweep(int instances, int candidates, const DivergenceSpec& div,
                                                       std::uint64_t seed) {
  require(instances >= 1 && candidates >= 2, "local_optimality_sweep: need instances and candidates");
  std::vector<double> eps;
  for (int j = 0; j < 6; ++j) eps.push_back(1e-6 * std::pow(4.0, j));
  stats::RngStream rng(seed);
  std::vector<LocalOptimalityRow> out;
  for (int attempt = 0; static_cast<int>(out.size()) < instances; ++attempt) {
    if (attempt > 100 * instances) throw NumericalError("local_optimality_sweep: too few usable instances");
    const auto inst = fs::random_instance(rng);
    const Eigen::VectorXd post = fs::posterior_reduce(inst).class_means;
    if (fs::local_slope(inst, post, div) < 1e-3) continue;

    std::vector<Eigen::VectorXd> cands{(post.array() + 0.1).matrix()};
    if (inst.psi.cols() > 0) {
      // Class-level perturbation along the first moment function.
      Eigen::VectorXd span = Eigen::VectorXd::Zero(post.size());
      const auto idx = inst.class_index();
      for (std::size_t k = 0; k < idx.size(); ++k)
        span(static_cast<Eigen::Index>(idx[k])) = inst.psi(static_cast<Eigen::Index>(k), 0);
      cands.push_back(post + 0.3 * span);
    }
    while (static_cast<int>(cands.size()) < candidates) {
      Eigen::VectorXd g = post;
      for (auto& v : g) v += 0.2 * rng.normal();
      cands.push_back(g);
    }
    const auto rep = fs::verify_theorem1(inst, div, eps, cands);
    LocalOptimalityRow row;
    row.instance = attempt;
    row.posterior_slope = rep.fits[0].slope;
    row.analytic_slope = rep.fits[0].analytic_slope;
    row.min_candidate_slope = std::numeric_limits<double>::infinity();
    for (std::size_t c = 1; c < rep.fits.size(); ++c)
      row.min_candidate_slope = std::min(row.min_candidate_slope, rep.fits[c].slope);
    row.max_slope_gap = rep.max_slope_gap;
    row.slope_rel_error = rep.posterior_slope_rel_error;
    row.posterior_minimal = rep.posterior_minimal;
    out.push_back(row);
  }
  return out;
}

double dirichlet_limit_gap(int instances, double concentration, std::uint64_t seed) {
  stats::RngStream rng(seed);
  double gap = 0.0;
  for (int i = 0; i < instances; ++i) {
    const auto inst = fs::random_instance(rng);
    gap = std::max(gap, std::abs(fs::dirichlet_posterior_mean(inst, concentration) - fs::posterior_reduce(inst).estimate));
  }
  return gap;
}

}  // namespace robpost::exp
