#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace robpost::exp {

/// Plot-ready numeric table written as CSV.
struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row);
  void write_csv(std::ostream& out) const;
};

/// Acceptance metric with its admissible range; booleans use [1, 1].
struct Check {
  std::string name;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  bool passed() const { return value >= lower && value <= upper; }
  static Check flag(std::string name, bool ok) { return {std::move(name), ok ? 1.0 : 0.0, 1.0, 1.0}; }
};

struct FigureResult {
  std::string id;
  std::vector<Table> tables;
  std::vector<Check> checks;
  std::map<std::string, double> metrics;

  bool passed() const;
  /// {"id", "passed", "checks": [...], "metrics": {...}}
  std::string summary_json() const;
};

/// Fixed 12 significant digits, so repeated runs are byte-identical.
std::string format_number(double v);

}  // namespace robpost::exp
