#include "robpost/experiments/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"
#include "robpost/error.hpp"

namespace robpost::exp {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

void Table::add(std::vector<double> row) {
  require(row.size() == columns.size(), "table '" + name + "': row has the wrong number of entries");
  rows.push_back(std::move(row));
}

void Table::write_csv(std::ostream& out) const {
  for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << columns[j];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_number(row[j]);
    out << '\n';
  }
}

bool FigureResult::passed() const {
  for (const auto& c : checks)
    if (!c.passed()) return false;
  return true;
}

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string FigureResult::summary_json() const {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["passed"] = passed();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks)
    j["checks"].push_back({{"name", c.name},
                           {"value", number(c.value)},
                           {"lower", number(c.lower)},
                           {"upper", number(c.upper)},
                           {"passed", c.passed()}});
  j["metrics"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : metrics) j["metrics"][k] = number(v);
  j["tables"] = nlohmann::ordered_json::array();
  for (const auto& t : tables) j["tables"].push_back(t.name + ".csv");
  return j.dump(2) + "\n";
}

}  // namespace robpost::exp
