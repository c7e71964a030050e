#ifndef UAVMAC_CLI_COMPARE_HPP
#define UAVMAC_CLI_COMPARE_HPP

#include <string>
#include <vector>

#include "uavmac/cli/results.hpp"

namespace uavmac::cli {

struct CompareRow {
  std::vector<std::string> key;  // echo columns
  double a = 0.0;
  double b = 0.0;
  double gap = 0.0;
};

struct CompareReport {
  std::vector<std::string> key_columns;
  std::vector<CompareRow> rows;
  double max_gap = 0.0;
  double mean_gap = 0.0;
  double threshold = 0.05;
  bool pass = true;
};

/// Joins two result tables on the config echo columns. Side A takes the
/// analytic throughput when it has one, side B the simulated one; each falls
/// back to whatever the file holds. Throws Error("join") when keys do not
/// match one to one.
[[nodiscard]] CompareReport compare(const CsvTable& a, const CsvTable& b, double threshold = 0.05);

/// Per-row CSV (key columns, s_a, s_b, gap) followed by '#' summary lines.
[[nodiscard]] std::string format_report(const CompareReport& report);

}  // namespace uavmac::cli

#endif  // UAVMAC_CLI_COMPARE_HPP
