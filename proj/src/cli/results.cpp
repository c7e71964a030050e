#include "uavmac/cli/results.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "uavmac/simulator.hpp"

namespace uavmac::cli {

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c = echo_keys();
    for (const char* name :
         {"mode", "delta_us", "n_clusters", "p_tr", "p_s", "throughput", "iterations", "residual",
          "seed", "replications", "sim_duration_s", "throughput_sim", "ci95", "successes",
          "collisions", "drops", "quits"}) {
      c.emplace_back(name);
    }
    return c;
  }();
  return cols;
}

std::string csv_header() {
  std::string out;
  for (const auto& c : csv_columns()) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

template <typename Int>
std::string cell(const std::optional<Int>& v) {
  return v ? std::to_string(*v) : std::string();
}

}  // namespace

std::string csv_line(const ResultRow& row) {
  std::vector<std::string> cells;
  for (const auto& key : echo_keys()) cells.push_back(get_value(row.config, key));
  cells.push_back(row.mode);
  cells.push_back(row.delta_us ? std::to_string(std::llround(*row.delta_us)) : std::string());
  cells.push_back(cell(row.n_clusters));
  cells.push_back(cell(row.p_tr));
  cells.push_back(cell(row.p_s));
  cells.push_back(cell(row.throughput));
  cells.push_back(cell(row.iterations));
  cells.push_back(cell(row.residual));
  const bool sim = row.throughput_sim.has_value();
  cells.push_back(sim ? std::to_string(row.config.seed) : std::string());
  cells.push_back(sim ? std::to_string(row.config.replications) : std::string());
  cells.push_back(cell(row.sim_duration_s));
  cells.push_back(cell(row.throughput_sim));
  cells.push_back(cell(row.ci95));
  cells.push_back(cell(row.successes));
  cells.push_back(cell(row.collisions));
  cells.push_back(cell(row.drops));
  cells.push_back(cell(row.quits));

  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::vector<std::string> split_record(const std::string& line, const std::string& where) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  if (quoted) throw Error("bad-csv", where + ": unterminated quoted field");
  out.push_back(std::move(field));
  return out;
}

}  // namespace

CsvTable read_csv(std::istream& in, const std::string& source) {
  CsvTable t;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    const std::string where = source + ":" + std::to_string(line_no);
    auto fields = split_record(line, where);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw Error("bad-csv", where + ": expected " + std::to_string(t.header.size()) +
                                 " fields, found " + std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  if (t.header.empty()) throw Error("bad-csv", source + ": no header row");
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("unreadable-file", path + ": cannot open file");
  return read_csv(in, path);
}

ResultRow run_analytic(const RunConfig& config, const AnalyticOptions& options) {
  const AnalyticResult r = analyze(config.scenario, config.timing, options);
  ResultRow row;
  row.config = config;
  row.mode = "analytic";
  row.delta_us = r.delta_s * 1e6;
  row.n_clusters = r.partition.size();
  row.p_tr = r.report.p_tr;
  row.p_s = r.report.p_s;
  row.throughput = r.report.throughput;
  row.iterations = r.solution.iterations;
  row.residual = r.solution.residual;
  return row;
}

ResultRow run_simulation(const RunConfig& config, const RunOptions& options) {
  SimConfig sim;
  sim.scenario = config.scenario;
  sim.timing = config.timing;
  sim.sim_duration_s = config.sim_duration_s;
  sim.seed = config.seed;
  sim.replications = config.replications;
  sim.check_invariants = options.check_invariants;
  sim.workers = options.workers;
  // Clusters for the modified protocol are cut with the same traversal time
  // the analytic side uses.
  sim.delta_s =
      options.analytic.delta_mode == DeltaMode::relaxed
          ? analyze(config.scenario, config.timing, options.analytic).delta_s
          : initial_traversal_time(config.scenario, config.timing, options.analytic.delta_mode,
                                   options.analytic.solver);
  const SimReport rep = run(sim);

  ResultRow row;
  row.config = config;
  row.mode = "simulate";
  row.delta_us = rep.delta_s * 1e6;
  row.n_clusters = rep.n_clusters;
  row.sim_duration_s = sim.duration();
  row.throughput_sim = rep.throughput;
  row.ci95 = rep.ci95;
  row.successes = rep.successes;
  row.collisions = rep.collisions;
  row.drops = rep.drops;
  row.quits = rep.quits;
  return row;
}

}  // namespace uavmac::cli
