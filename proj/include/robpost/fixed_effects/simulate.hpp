#pragma once

#include <cstddef>

#include "robpost/data/panel.hpp"
#include "robpost/stats/distributions.hpp"
#include "robpost/stats/rng.hpp"

namespace robpost::fe {

/// Y_ij = alpha_i + eps_ij with alpha_i ~ `alpha` and eps_ij ~ N(0, var_eps).
PanelData simulate_panel(std::size_t units, int J, const stats::Distribution& alpha, double var_eps,
                         stats::RngStream& rng, Eigen::VectorXd* true_alpha = nullptr);

}  // namespace robpost::fe
