#include "robpost/fixed_effects/simulate.hpp"

#include <cmath>

#include "robpost/error.hpp"

namespace robpost::fe {

PanelData simulate_panel(std::size_t units, int J, const stats::Distribution& alpha, double var_eps,
                         stats::RngStream& rng, Eigen::VectorXd* true_alpha) {
  require(units >= 1 && J >= 1, "simulate_panel: need at least one unit and one measurement");
  require(var_eps >= 0.0, "simulate_panel: noise variance must be nonnegative");
  const auto n = static_cast<Eigen::Index>(units);
  const auto a = stats::draw(alpha, rng, units);
  Eigen::MatrixXd y(n, J);
  const double sd = std::sqrt(var_eps);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int j = 0; j < J; ++j) y(i, j) = a[i] + sd * rng.normal();
  if (true_alpha) *true_alpha = Eigen::Map<const Eigen::VectorXd>(a.data(), n);
  return PanelData::from_matrix(std::move(y));
}

}  // namespace robpost::fe
