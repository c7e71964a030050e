#ifndef UAVMAC_CLI_SWEEP_HPP
#define UAVMAC_CLI_SWEEP_HPP

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "uavmac/cli/results.hpp"

namespace uavmac::cli {

enum class Axis { velocity, density, retry_limit, cw_min, radius };

std::string_view to_string(Axis axis);
Axis parse_axis(std::string_view text);

struct Mode {
  bool simulate = false;
  Mechanism mechanism = Mechanism::basic;
  Variant variant = Variant::conventional;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

struct SweepSpec {
  Axis axis = Axis::velocity;
  std::vector<double> values;
  std::vector<Overrides> series{Overrides{}};  // each series re-runs the axis
  std::vector<Mode> modes;
};

/// Cartesian product of the kinds, mechanisms and variants named in a comma
/// list such as "analytic,simulate,basic,rts_cts". A dimension with no token
/// takes analytic / the base config value.
[[nodiscard]] std::vector<Mode> parse_modes(std::string_view text, const RunConfig& base);

/// "fig3" .. "fig12".
[[nodiscard]] SweepSpec preset(std::string_view name);
[[nodiscard]] const std::vector<std::string>& preset_names();

/// Parses "10,20,30" into strictly increasing values.
[[nodiscard]] std::vector<double> parse_values(std::string_view text);

/// Applies one axis value (and the mirrored modified-protocol key).
void apply_axis(RunConfig& config, Axis axis, double value);

/// Rows ordered by series, then axis value, then mode, whatever order the
/// worker pool finishes in.
[[nodiscard]] std::vector<ResultRow> run_sweep(const SweepSpec& spec, const RunConfig& base,
                                               const RunOptions& options);

}  // namespace uavmac::cli

#endif  // UAVMAC_CLI_SWEEP_HPP
