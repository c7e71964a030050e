#include "uavmac/cli/sweep.hpp"

#include <charconv>
#include <cmath>

#include "uavmac/parallel.hpp"

namespace uavmac::cli {

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::velocity: return "velocity";
    case Axis::density: return "density";
    case Axis::retry_limit: return "retry_limit";
    case Axis::cw_min: return "cw_min";
    case Axis::radius: return "radius";
  }
  return "velocity";
}

Axis parse_axis(std::string_view text) {
  for (Axis a : {Axis::velocity, Axis::density, Axis::retry_limit, Axis::cw_min, Axis::radius}) {
    if (text == to_string(a)) return a;
  }
  throw ConfigError("bad-axis", "--axis",
                    "unknown axis '" + std::string(text) +
                        "' (velocity|density|retry_limit|cw_min|radius)");
}

namespace {

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = text.find(',');
    auto token = text.substr(0, comma);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (!token.empty()) out.push_back(token);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

std::vector<Mode> parse_modes(std::string_view text, const RunConfig& base) {
  std::vector<bool> kinds;
  std::vector<Mechanism> mechs;
  std::vector<Variant> variants;
  for (auto token : split_commas(text)) {
    if (token == "analytic") {
      kinds.push_back(false);
    } else if (token == "simulate" || token == "sim") {
      kinds.push_back(true);
    } else if (token == "basic" || token == "rts_cts" || token == "rts") {
      mechs.push_back(parse_mechanism(token));
    } else if (token == "conventional" || token == "modified") {
      variants.push_back(parse_variant(token));
    } else {
      throw ConfigError("bad-mode", "--modes", "unknown mode token '" + std::string(token) + "'");
    }
  }
  if (kinds.empty()) kinds.push_back(false);
  if (mechs.empty()) mechs.push_back(base.scenario.mechanism);
  if (variants.empty()) variants.push_back(base.scenario.variant);
  std::vector<Mode> modes;
  for (auto m : mechs) {
    for (auto v : variants) {
      for (bool k : kinds) modes.push_back({k, m, v});
    }
  }
  return modes;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"fig3", "fig4",  "fig5",  "fig6",  "fig7",
                                                 "fig8", "fig9", "fig10", "fig11", "fig12"};
  return names;
}

SweepSpec preset(std::string_view name) {
  const std::vector<Mode> both_kinds_conv = {
      {false, Mechanism::basic, Variant::conventional},
      {true, Mechanism::basic, Variant::conventional},
      {false, Mechanism::rts_cts, Variant::conventional},
      {true, Mechanism::rts_cts, Variant::conventional}};
  auto both_variants = [](Mechanism m) {
    return std::vector<Mode>{{false, m, Variant::conventional}, {false, m, Variant::modified}};
  };

  SweepSpec s;
  if (name == "fig3" || name == "fig4") {
    s.axis = Axis::velocity;
    s.values = {10, 20, 30, 40, 50};
    const bool modified = name == "fig4";
    const char* key = modified ? "cw_min_max" : "cw_min";
    s.series = {{{key, "8"}}, {{key, "16"}}};
    s.modes = both_kinds_conv;
    if (modified) {
      for (auto& m : s.modes) m.variant = Variant::modified;
    }
    return s;
  }
  if (name == "fig5" || name == "fig6") {
    s.axis = Axis::density;
    s.values = {50, 60, 70, 80, 90, 100};
    s.series = {{{"speed_mps", "10"}}, {{"speed_mps", "20"}}};
    s.modes = both_variants(name == "fig5" ? Mechanism::basic : Mechanism::rts_cts);
    return s;
  }
  if (name == "fig7" || name == "fig8") {
    s.axis = Axis::retry_limit;
    s.values = {7, 8, 9, 10, 11, 12, 13, 14};
    s.series = {{{"speed_mps", "10"}}};
    s.modes = both_variants(name == "fig7" ? Mechanism::basic : Mechanism::rts_cts);
    return s;
  }
  if (name == "fig9" || name == "fig10") {
    s.axis = Axis::cw_min;
    s.values = {8, 16, 32, 64, 128, 256};
    s.series = {{{"speed_mps", "10"}, {"retry_limit", "8"}, {"retry_limit_max", "8"}}};
    s.modes = both_variants(name == "fig9" ? Mechanism::basic : Mechanism::rts_cts);
    return s;
  }
  if (name == "fig11" || name == "fig12") {
    s.axis = Axis::radius;
    s.values = {1000, 1250, 1500, 1750, 2000};
    s.series = {{{"speed_mps", "10"}, {"retry_limit", "8"}, {"retry_limit_max", "8"}}};
    s.modes = both_variants(name == "fig11" ? Mechanism::basic : Mechanism::rts_cts);
    return s;
  }
  throw ConfigError("bad-preset", "--preset",
                    "unknown preset '" + std::string(name) + "' (fig3..fig12)");
}

std::vector<double> parse_values(std::string_view text) {
  std::vector<double> out;
  for (auto token : split_commas(text)) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v))
      throw ConfigError("bad-values", "--values", "not a number: '" + std::string(token) + "'");
    if (!out.empty() && !(v > out.back()))
      throw ConfigError("bad-values", "--values", "values must be strictly increasing");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("bad-values", "--values", "at least one value is required");
  return out;
}

void apply_axis(RunConfig& config, Axis axis, double value) {
  const std::string where = "--values";
  const std::string text = format_number(value);
  auto integral = [&] {
    if (value != std::floor(value))
      throw ConfigError("bad-values", where,
                        std::string(to_string(axis)) + " needs integer values, got " + text);
  };
  switch (axis) {
    case Axis::velocity: set_value(config, "speed_mps", text, where); break;
    case Axis::density: set_value(config, "density_per_km2", text, where); break;
    case Axis::radius: set_value(config, "radius_m", text, where); break;
    case Axis::retry_limit:
      integral();
      set_value(config, "retry_limit", text, where);
      set_value(config, "retry_limit_max", text, where);
      break;
    case Axis::cw_min:
      integral();
      set_value(config, "cw_min", text, where);
      set_value(config, "cw_min_max", text, where);
      break;
  }
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec, const RunConfig& base,
                                 const RunOptions& options) {
  if (spec.values.empty()) throw ConfigError("bad-values", "--values", "no sweep values");
  for (std::size_t i = 1; i < spec.values.size(); ++i) {
    if (!(spec.values[i] > spec.values[i - 1]))
      throw ConfigError("bad-values", "--values", "values must be strictly increasing");
  }
  if (spec.modes.empty()) throw ConfigError("bad-mode", "--modes", "no modes selected");

  struct Task {
    RunConfig config;
    bool simulate;
  };
  std::vector<Task> tasks;
  for (const auto& series : spec.series) {
    for (double v : spec.values) {
      for (const auto& mode : spec.modes) {
        RunConfig c = base;
        for (const auto& [key, value] : series) set_value(c, key, value, "preset");
        apply_axis(c, spec.axis, v);
        c.scenario.mechanism = mode.mechanism;
        c.scenario.variant = mode.variant;
        tasks.push_back({ConfigBuilder(c).build(), mode.simulate});
      }
    }
  }

  std::vector<ResultRow> rows(tasks.size());
  const unsigned workers = options.workers == 0 ? default_workers() : options.workers;
  RunOptions inner = options;
  inner.workers = workers > 1 ? 1 : options.workers;
  parallel_for(
      tasks.size(),
      [&](std::size_t i) {
        rows[i] = tasks[i].simulate ? run_simulation(tasks[i].config, inner)
                                    : run_analytic(tasks[i].config, inner.analytic);
      },
      workers);
  return rows;
}

}  // namespace uavmac::cli
