#ifndef UAVMAC_CLI_CONFIG_HPP
#define UAVMAC_CLI_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "uavmac/core.hpp"

namespace uavmac::cli {

/// Everything a run needs besides the solver knobs.
struct RunConfig {
  ScenarioConfig scenario;
  MacTiming timing;
  std::uint64_t seed = 1;
  int replications = 10;
  double sim_duration_s = 0.0;  // 0: warmup + two coverage turnovers
};

/// Raised for unreadable files, syntax errors, unknown keys, bad values and
/// failed validation. `where()` is "file:line" or "--key" when known.
class ConfigError : public Error {
 public:
  ConfigError(std::string code, std::string where, const std::string& message)
      : Error(std::move(code), where.empty() ? message : where + ": " + message),
        where_(std::move(where)) {}
  [[nodiscard]] const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// Documented keys in file order.
[[nodiscard]] const std::vector<std::string>& config_keys();
/// Keys echoed in every CSV row (the scenario and timing ones).
[[nodiscard]] const std::vector<std::string>& echo_keys();

[[nodiscard]] bool is_config_key(std::string_view key);

/// Sets one key from its textual value; throws ConfigError("bad-value").
void set_value(RunConfig& config, std::string_view key, std::string_view value,
               const std::string& where = {});
/// Formats one key the way CSV rows echo it.
[[nodiscard]] std::string get_value(const RunConfig& config, std::string_view key);

/// Accumulates overrides with their origin, then validates once.
class ConfigBuilder {
 public:
  ConfigBuilder() = default;
  explicit ConfigBuilder(RunConfig base) : config_(std::move(base)) {}

  /// Parses `key = value` lines ('#' starts a comment).
  void parse_text(std::string_view text, const std::string& source);
  void load_file(const std::string& path);
  void set(std::string_view key, std::string_view value, const std::string& where);

  /// Applies core validation; errors point at the line or flag that set the
  /// offending key.
  [[nodiscard]] RunConfig build() const;
  [[nodiscard]] const RunConfig& current() const { return config_; }

 private:
  RunConfig config_;
  std::map<std::string, std::string, std::less<>> origin_;
};

/// Convenience: defaults + file, validated.
[[nodiscard]] RunConfig load_config(const std::string& path);

/// printf-style "%.9g".
[[nodiscard]] std::string format_number(double value);

}  // namespace uavmac::cli

#endif  // UAVMAC_CLI_CONFIG_HPP
