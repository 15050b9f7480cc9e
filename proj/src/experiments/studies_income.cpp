#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "robpost/experiments/studies.hpp"

namespace robpost::exp {

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

IncomeCurves income_curves(const PanelData& panel, const std::vector<double>& tau, std::size_t r2_draws,
                           std::uint64_t seed) {
  IncomeCurves out;
  out.tau = tau;
  out.params = income::estimate_pt(panel).params;
  out.eta = income::quantile_difference_curve(panel, out.params, income::Component::eta, tau);
  out.eps = income::quantile_difference_curve(panel, out.params, income::Component::eps, tau);
  const stats::RngStream base(seed);
  stats::RngStream r1 = base.split(1), r2 = base.split(2);
  out.r2_eta = income::pt_informativeness(out.params, income::Component::eta, tau, r2_draws, r1);
  out.r2_eps = income::pt_informativeness(out.params, income::Component::eps, tau, r2_draws, r2);
  return out;
}

IncomeNull income_gaussian_null(std::size_t n, const std::vector<double>& tau, std::uint64_t seed) {
  income::PtSimulationConfig cfg;
  cfg.params = income::psid_like_params();
  stats::RngStream rng(seed);
  const PanelData panel = income::simulate_pt(cfg, n, rng);
  const auto fit = income::estimate_pt(panel);
  IncomeNull out;
  out.max_abs_eta = max_abs(income::quantile_difference_curve(panel, fit.params, income::Component::eta, tau).difference);
  out.max_abs_eps = max_abs(income::quantile_difference_curve(panel, fit.params, income::Component::eps, tau).difference);
  return out;
}

IncomeSignature income_peakedness(std::size_t n, std::uint64_t seed) {
  income::PtSimulationConfig cfg;
  cfg.params = income::psid_like_params();
  cfg.scale_mixture = true;
  stats::RngStream rng(seed);
  const PanelData panel = income::simulate_pt(cfg, n, rng);
  const auto fit = income::estimate_pt(panel);
  const std::vector<double> tau{0.1, 0.9};
  const auto eta = income::quantile_difference_curve(panel, fit.params, income::Component::eta, tau);
  const auto eps = income::quantile_difference_curve(panel, fit.params, income::Component::eps, tau);
  return {eta.difference[0], eta.difference[1], eps.difference[0], eps.difference[1]};
}

double income_additive_gap(std::size_t n, std::uint64_t seed) {
  income::PtSimulationConfig cfg;
  cfg.params = income::psid_like_params();
  stats::RngStream rng(seed);
  const PanelData panel = income::simulate_pt(cfg, n, rng);
  const income::PtPosterior post(income::estimate_pt(panel).params);
  const Eigen::MatrixXd sum = post.means(panel, income::Component::eta) + post.means(panel, income::Component::eps);
  return (sum - panel.y).cwiseAbs().maxCoeff();
}

}  // namespace robpost::exp
