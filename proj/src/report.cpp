#include "etherstar/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace etherstar {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw DomainError("Table: row width does not match the header");
  rows.push_back(std::move(row));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

nlohmann::json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return format_number(v);
        }
        return v;
      },
      c);
}

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_number(v);
        else if constexpr (std::is_same_v<T, long long>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else return v;
      },
      c);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

nlohmann::json table_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) {
    nlohmann::json o = nlohmann::json::object();
    for (std::size_t i = 0; i < r.size(); ++i) o[t.columns[i]] = cell_json(r[i]);
    rows.push_back(std::move(o));
  }
  return rows;
}

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
  os << "\r\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(cell_text(r[i]));
    os << "\r\n";
  }
}

nlohmann::json report_json(const std::string& command, const std::string& status, const nlohmann::json& header,
                           const Table& t) {
  nlohmann::json j = {{"schema", kReportSchema}, {"command", command}, {"status", status}};
  for (const auto& [k, v] : header.items()) j[k] = v;
  j["columns"] = t.columns;
  j["rows"] = table_json(t);
  return j;
}

Table suite_table(const SuiteReport& r, bool with_timing) {
  Table t;
  t.columns = {"name", "status", "max_residual", "tolerance", "samples", "skipped", "note"};
  if (with_timing) t.columns.push_back("wall_seconds");
  for (const CheckResult& c : r.checks) {
    std::vector<Cell> row{c.name, std::string(c.passed ? "pass" : "fail"), c.max_residual, c.tolerance,
                          static_cast<long long>(c.samples), static_cast<long long>(c.skipped), c.note};
    if (with_timing) row.emplace_back(c.wall_seconds);
    t.add(std::move(row));
  }
  return t;
}

}  // namespace etherstar
