#include "robpost/data/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "robpost/error.hpp"

namespace robpost {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      out.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  out.push_back(cell);
  for (auto& c : out) {
    const auto b = c.find_first_not_of(" \t");
    const auto e = c.find_last_not_of(" \t");
    c = b == std::string::npos ? std::string() : c.substr(b, e - b + 1);
  }
  return out;
}

double parse_number(const std::string& s, const std::string& context) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (s.empty() || res.ec != std::errc() || res.ptr != end || !std::isfinite(v))
    throw ValidationError("csv: non-numeric value '" + s + "' in " + context);
  return v;
}

}  // namespace

PanelData PanelData::from_matrix(Eigen::MatrixXd y) {
  PanelData p;
  p.y = std::move(y);
  p.unit_ids.resize(p.y.rows());
  for (Eigen::Index i = 0; i < p.y.rows(); ++i) p.unit_ids[i] = std::to_string(i + 1);
  return p;
}

void SummaryEffects::validate() const {
  require(effect.size() == noise_var.size() && effect.size() == weight.size(), "summary: column lengths differ");
  require(effect.size() >= 2, "summary: need at least two units");
  require((noise_var.array() >= 0.0).all(), "summary: noise variances must be nonnegative");
  require((weight.array() >= 0.0).all(), "summary: weights must be nonnegative");
  require(weight.sum() > 0.0, "summary: weights sum to zero");
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ValidationError("csv: missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  return parse_number(rows.at(row).at(col), "row " + std::to_string(row + 2) + ", column '" + header.at(col) + "'");
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("csv: empty input (header row required)");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  t.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_line(line);
    if (cells.size() != t.header.size())
      throw ValidationError("csv: row " + std::to_string(t.rows.size() + 2) + " has " + std::to_string(cells.size()) +
                            " fields, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return read_csv(in);
}

PanelData read_panel_csv(std::istream& in, const std::string& index_column) {
  const CsvTable t = read_csv(in);
  const auto cu = t.column("unit_id"), cj = t.column(index_column), cy = t.column("y");
  std::vector<std::string> units;
  std::map<std::string, std::size_t> unit_pos;
  std::map<double, std::size_t> period_pos;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& id = t.rows[r][cu];
    if (unit_pos.emplace(id, units.size()).second) units.push_back(id);
    period_pos.emplace(t.number(r, cj), 0);
  }
  require(!units.empty(), "panel: no data rows");
  std::size_t k = 0;
  for (auto& [_, pos] : period_pos) pos = k++;
  const auto n = static_cast<Eigen::Index>(units.size());
  const auto J = static_cast<Eigen::Index>(period_pos.size());
  Eigen::MatrixXd y = Eigen::MatrixXd::Constant(n, J, std::nan(""));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(unit_pos[t.rows[r][cu]]);
    const auto j = static_cast<Eigen::Index>(period_pos[t.number(r, cj)]);
    if (!std::isnan(y(i, j)))
      throw ValidationError("panel: duplicate observation for unit '" + t.rows[r][cu] + "'");
    y(i, j) = t.number(r, cy);
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < J; ++j)
      if (std::isnan(y(i, j)))
        throw ValidationError("panel: not rectangular (unit '" + units[i] + "' lacks a measurement)");
  PanelData p;
  p.unit_ids = std::move(units);
  p.y = std::move(y);
  return p;
}

void write_panel_csv(std::ostream& out, const PanelData& panel, const std::string& index_column) {
  out << "unit_id," << index_column << ",y\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < panel.units(); ++i)
    for (Eigen::Index j = 0; j < panel.periods(); ++j)
      out << panel.unit_ids[i] << ',' << (j + 1) << ',' << panel.y(i, j) << '\n';
}

SummaryEffects read_summary_csv(std::istream& in) {
  const CsvTable t = read_csv(in);
  const auto cu = t.column("unit_id"), ce = t.column("effect"), cn = t.column("noise_var"), cw = t.column("weight");
  SummaryEffects s;
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  s.effect.resize(n);
  s.noise_var.resize(n);
  s.weight.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    s.unit_ids.push_back(t.rows[r][cu]);
    s.effect(r) = t.number(r, ce);
    s.noise_var(r) = t.number(r, cn);
    s.weight(r) = t.number(r, cw);
  }
  s.validate();
  return s;
}

void write_summary_csv(std::ostream& out, const SummaryEffects& s) {
  out << "unit_id,effect,noise_var,weight\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < s.size(); ++i)
    out << s.unit_ids[i] << ',' << s.effect(i) << ',' << s.noise_var(i) << ',' << s.weight(i) << '\n';
}

}  // namespace robpost
