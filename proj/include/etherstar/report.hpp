#pragma once

// Machine-readable output: versioned JSON documents and RFC-4180 CSV tables.

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "etherstar/checks.hpp"

namespace etherstar {

using Cell = std::variant<double, long long, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

inline constexpr int kReportSchema = 1;

/// Shortest round-trip decimal; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double v);

/// Array of row objects keyed by column name.
nlohmann::json table_json(const Table& t);
/// Header row then data rows, CRLF line ends, quoting as RFC 4180 requires.
void write_csv(std::ostream& os, const Table& t);

/// {"schema": 1, "command": ..., "status": ..., ...header, "rows": [...]}
nlohmann::json report_json(const std::string& command, const std::string& status, const nlohmann::json& header,
                           const Table& t);

/// One row per check; wall time only when asked, so reports stay reproducible.
Table suite_table(const SuiteReport& r, bool with_timing);

}  // namespace etherstar
