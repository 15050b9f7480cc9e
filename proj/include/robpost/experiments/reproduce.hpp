#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "robpost/experiments/report.hpp"
#include "robpost/fixed_effects/neighborhood.hpp"
#include "robpost/robustness/divergence.hpp"

namespace robpost::exp {

struct ReproduceOptions {
  std::uint64_t seed = 20240607;
  unsigned threads = 1;
  std::string data_path;  // optional real-data CSV for fig1 (summary) and fig3 (panel)
  std::size_t draws = 0;  // reference draws; 0 keeps each figure's default
  int reps = 0;           // Monte Carlo replications; 0 keeps each figure's default
  DivergenceSpec divergence;
  fe::NeighborhoodOptions neighborhood;  // trimming and weighting for fig1
};

/// fig1, fig2, fig3, figD1, figD2, binary_ratio, theorem_sweep.
const std::vector<std::string>& figure_ids();

/// Runs one reproduction. Throws ValidationError for an unknown id.
FigureResult reproduce(const std::string& id, const ReproduceOptions& options);

}  // namespace robpost::exp
