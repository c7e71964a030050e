#include "uavmac/cli/app.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "uavmac/cli/compare.hpp"
#include "uavmac/cli/sweep.hpp"

namespace uavmac::cli {

namespace {

struct Common {
  std::string config_path;
  std::map<std::string, std::string> keys;  // flag overrides, by key
  std::string delta_mode = "contention_free";
  std::string busy_model = "verbatim";
  std::string quit_model = "derived";
  std::string output;
  unsigned workers = 0;
  bool check_invariants = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-c,--config", c.config_path, "key = value config file");
  for (const auto& key : config_keys()) {
    auto* opt = sub->add_option_function<std::string>(
        "--" + key, [&c, key](const std::string& v) { c.keys[key] = v; },
        "override config key " + key);
    opt->type_name("VALUE");
  }
  sub->add_option("--delta-mode", c.delta_mode,
                  "traversal time for the cluster cut: contention_free|static|relaxed")
      ->capture_default_str();
  sub->add_option("--busy-model", c.busy_model, "own-cluster busy factor: verbatim|normalized")
      ->capture_default_str();
  sub->add_option("--quit-model", c.quit_model, "quitting probability: derived|stationary|disabled")
      ->capture_default_str();
  sub->add_option("-o,--output", c.output, "write CSV here instead of stdout");
  sub->add_option("--workers", c.workers, "worker threads (0 = hardware concurrency)");
}

RunConfig build_config(const Common& c) {
  ConfigBuilder b;
  if (!c.config_path.empty()) b.load_file(c.config_path);
  // Flags apply in documented key order so the result does not depend on
  // the order they were typed in.
  for (const auto& key : config_keys()) {
    if (auto it = c.keys.find(key); it != c.keys.end()) b.set(key, it->second, "--" + key);
  }
  return b.build();
}

RunOptions build_options(const Common& c) {
  RunOptions o;
  auto wrap = [](const char* flag, auto parse, const std::string& text) {
    try {
      return parse(text);
    } catch (const Error& e) {
      throw ConfigError("bad-value", flag, e.what());
    }
  };
  o.analytic.delta_mode = wrap("--delta-mode", parse_delta_mode, c.delta_mode);
  o.analytic.solver.busy_model = wrap("--busy-model", parse_busy_model, c.busy_model);
  o.analytic.solver.quit_model = wrap("--quit-model", parse_quit_model, c.quit_model);
  o.workers = c.workers;
  o.check_invariants = c.check_invariants;
  return o;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    out.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("unwritable-file", path, "cannot open output file");
  f << text;
  if (!f.flush()) throw ConfigError("unwritable-file", path, "write failed");
}

std::string render(const std::vector<ResultRow>& rows) {
  std::string text = csv_header() + '\n';
  for (const auto& r : rows) text += csv_line(r) + '\n';
  return text;
}

std::string one_line(std::string s) {
  for (char& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Saturation throughput of CSMA/CA under a moving UAV collector", "uavmac"};
  app.require_subcommand(1);

  Common analytic_opts, sim_opts, sweep_opts;
  auto* analytic = app.add_subcommand("analytic", "solve the cluster model and print one CSV row");
  add_common(analytic, analytic_opts);

  auto* simulate = app.add_subcommand("simulate", "run the Monte Carlo simulator");
  add_common(simulate, sim_opts);
  simulate->add_flag("--check-invariants", sim_opts.check_invariants,
                     "assert backoff legality after every slot");

  auto* sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
  add_common(sweep, sweep_opts);
  std::string preset_name, axis_name, values_text, modes_text;
  sweep->add_option("--preset", preset_name, "fig3 .. fig12");
  sweep->add_option("--axis", axis_name, "velocity|density|retry_limit|cw_min|radius");
  sweep->add_option("--values", values_text, "comma-separated, strictly increasing");
  sweep->add_option("--modes", modes_text,
                    "comma list from analytic,simulate,basic,rts_cts,conventional,modified");
  sweep->add_flag("--check-invariants", sweep_opts.check_invariants,
                  "assert backoff legality in simulated points");

  auto* cmp = app.add_subcommand("compare", "model-vs-simulation gap report");
  std::string file_a, file_b, cmp_output;
  double threshold = 0.05;
  cmp->add_option("first", file_a, "CSV whose analytic throughput is used")->required();
  cmp->add_option("second", file_b, "CSV whose simulated throughput is used")->required();
  cmp->add_option("--threshold", threshold, "max allowed |S - S_sim|")->capture_default_str();
  cmp->add_option("-o,--output", cmp_output, "write the report here instead of stdout");

  std::vector<const char*> argv;
  argv.push_back("uavmac");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) {
        app.exit(e, out, err);
        return kExitOk;
      }
      err << "E_USAGE: " << one_line(e.what()) << '\n';
      return kExitConfig;
    }

    if (analytic->parsed()) {
      const RunConfig config = build_config(analytic_opts);
      const RunOptions options = build_options(analytic_opts);
      emit(render({run_analytic(config, options.analytic)}), analytic_opts.output, out);
      return kExitOk;
    }
    if (simulate->parsed()) {
      const RunConfig config = build_config(sim_opts);
      const RunOptions options = build_options(sim_opts);
      emit(render({run_simulation(config, options)}), sim_opts.output, out);
      return kExitOk;
    }
    if (sweep->parsed()) {
      const RunConfig base = build_config(sweep_opts);
      const RunOptions options = build_options(sweep_opts);
      SweepSpec spec;
      if (!preset_name.empty()) {
        if (!axis_name.empty() || !values_text.empty())
          throw ConfigError("bad-sweep", "--preset", "--preset excludes --axis/--values");
        spec = preset(preset_name);
      } else {
        if (axis_name.empty() || values_text.empty())
          throw ConfigError("bad-sweep", "sweep", "give --preset or both --axis and --values");
        spec.axis = parse_axis(axis_name);
        spec.values = parse_values(values_text);
        spec.modes = parse_modes("", base);
      }
      if (!modes_text.empty()) spec.modes = parse_modes(modes_text, base);
      emit(render(run_sweep(spec, base, options)), sweep_opts.output, out);
      return kExitOk;
    }
    if (cmp->parsed()) {
      CompareReport rep;
      try {
        rep = compare(read_csv_file(file_a), read_csv_file(file_b), threshold);
      } catch (const Error& e) {
        if (e.code() == "unreadable-file") throw ConfigError(e.code(), "", e.what());
        err << "E_JOIN: " << one_line(e.what()) << '\n';
        return kExitCompare;
      }
      emit(format_report(rep), cmp_output, out);
      if (!rep.pass) {
        err << "E_COMPARE_FAIL: max gap " << format_number(rep.max_gap) << " exceeds threshold "
            << format_number(rep.threshold) << '\n';
        return kExitCompare;
      }
      return kExitOk;
    }
    err << "E_USAGE: no subcommand\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "E_CONFIG: " << one_line(e.what()) << " [" << e.code() << "]\n";
    return kExitConfig;
  } catch (const ConvergenceError& e) {
    err << "E_NO_CONVERGENCE: " << one_line(e.what()) << '\n';
    return kExitNoConvergence;
  } catch (const Error& e) {
    if (e.code() == "no-cluster") {
      err << "E_NO_CLUSTER: " << one_line(e.what()) << '\n';
      return kExitConfig;
    }
    err << "E_RUNTIME: " << one_line(e.what()) << " [" << e.code() << "]\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "E_INTERNAL: " << one_line(e.what()) << '\n';
    return kExitInternal;
  }
}

}  // namespace uavmac::cli
