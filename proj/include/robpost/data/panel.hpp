#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

namespace robpost {

/// Rectangular outcome panel: one row per unit, one column per measurement.
struct PanelData {
  std::vector<std::string> unit_ids;
  Eigen::MatrixXd y;  // n x J

  Eigen::Index units() const { return y.rows(); }
  Eigen::Index periods() const { return y.cols(); }
  Eigen::VectorXd unit_means() const { return y.rowwise().mean(); }

  static PanelData from_matrix(Eigen::MatrixXd y);
};

/// Unit-level effect estimates with known noise variances and population weights.
struct SummaryEffects {
  std::vector<std::string> unit_ids;
  Eigen::VectorXd effect;
  Eigen::VectorXd noise_var;
  Eigen::VectorXd weight;

  Eigen::Index size() const { return effect.size(); }
  void validate() const;
};

/// Minimal comma-separated table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, std::size_t col) const;
};

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Long-form panel: columns unit_id, j (or t), y. Must be rectangular.
PanelData read_panel_csv(std::istream& in, const std::string& index_column = "j");
void write_panel_csv(std::ostream& out, const PanelData& panel, const std::string& index_column = "j");

/// Columns unit_id, effect, noise_var, weight.
SummaryEffects read_summary_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const SummaryEffects& summary);

}  // namespace robpost
