#ifndef UAVMAC_CLI_RESULTS_HPP
#define UAVMAC_CLI_RESULTS_HPP

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "uavmac/analytic.hpp"
#include "uavmac/cli/config.hpp"

namespace uavmac::cli {

/// One CSV row. Analytic rows leave the simulation cells empty and vice versa.
struct ResultRow {
  RunConfig config;
  std::string mode;  // "analytic" or "simulate"

  std::optional<double> delta_us;
  std::optional<int> n_clusters;
  std::optional<double> p_tr;
  std::optional<double> p_s;
  std::optional<double> throughput;
  std::optional<int> iterations;
  std::optional<double> residual;

  std::optional<double> sim_duration_s;  // effective, after defaults
  std::optional<double> throughput_sim;
  std::optional<double> ci95;
  std::optional<std::int64_t> successes;
  std::optional<std::int64_t> collisions;
  std::optional<std::int64_t> drops;
  std::optional<std::int64_t> quits;
};

[[nodiscard]] const std::vector<std::string>& csv_columns();
[[nodiscard]] std::string csv_header();
[[nodiscard]] std::string csv_line(const ResultRow& row);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index, or -1.
  [[nodiscard]] int column(const std::string& name) const;
};

/// Minimal RFC-4180 reader (quoted fields, doubled quotes); '#' lines skipped.
[[nodiscard]] CsvTable read_csv(std::istream& in, const std::string& source);
[[nodiscard]] CsvTable read_csv_file(const std::string& path);

struct RunOptions {
  AnalyticOptions analytic;
  bool check_invariants = false;
  unsigned workers = 0;
};

[[nodiscard]] ResultRow run_analytic(const RunConfig& config, const AnalyticOptions& options);
[[nodiscard]] ResultRow run_simulation(const RunConfig& config, const RunOptions& options);

}  // namespace uavmac::cli

#endif  // UAVMAC_CLI_RESULTS_HPP
