#include "uavmac/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace uavmac::cli {

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_integer(std::string_view key, std::string_view text, const std::string& where) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("bad-value", where,
                      std::string(key) + ": expected an integer, got '" + std::string(text) + "'");
  }
  return value;
}

double parse_real(std::string_view key, std::string_view text, const std::string& where) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError("bad-value", where,
                      std::string(key) + ": expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

struct KeySpec {
  std::string name;
  bool echoed;
  std::function<void(RunConfig&, std::string_view, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define REAL_FIELD(KEY, EXPR)                                                             \
  KeySpec {                                                                               \
    KEY, true,                                                                            \
        [](RunConfig& c, std::string_view v, const std::string& w) {                      \
          EXPR = parse_real(KEY, v, w);                                                   \
        },                                                                                \
        [](const RunConfig& c) { return format_number(EXPR); }                            \
  }

const std::vector<KeySpec>& specs() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    t.push_back(REAL_FIELD("radius_m", c.scenario.radius_m));
    t.push_back(REAL_FIELD("speed_mps", c.scenario.speed_mps));
    t.push_back({"density_per_km2", true,
                 [](RunConfig& c, std::string_view v, const std::string& w) {
                   c.scenario.density_per_m2 = parse_real("density_per_km2", v, w) * 1e-6;
                 },
                 [](const RunConfig& c) { return format_number(c.scenario.density_per_m2 * 1e6); }});
    t.push_back({"mechanism", true,
                 [](RunConfig& c, std::string_view v, const std::string& w) {
                   try {
                     c.scenario.mechanism = parse_mechanism(v);
                   } catch (const Error& e) {
                     throw ConfigError("bad-value", w, std::string("mechanism: ") + e.what());
                   }
                 },
                 [](const RunConfig& c) { return std::string(to_string(c.scenario.mechanism)); }});
    t.push_back({"variant", true,
                 [](RunConfig& c, std::string_view v, const std::string& w) {
                   try {
                     c.scenario.variant = parse_variant(v);
                   } catch (const Error& e) {
                     throw ConfigError("bad-value", w, std::string("variant: ") + e.what());
                   }
                 },
                 [](const RunConfig& c) { return std::string(to_string(c.scenario.variant)); }});
    t.push_back({"cw_min", true,
                 [](RunConfig& c, std::string_view v, const std::string& w) {
                   c.scenario.cw_min = parse_integer<std::int64_t>("cw_min", v, w);
                 },
                 [](const RunConfig& c) { return std::to_string(c.scenario.cw_min); }});
    t.push_back({"retry_limit", true,
                 [](RunConfig& c, std::string_view v, const std::string& w) {
                   c.scenario.retry_limit = parse_integer<int>("retry_limit", v, w);
                 },
                 [](const RunConfig& c) { return std::to_string(c.scenario.retry_limit); }});
    t.push_back({"cw_min_max", true,
                 [](RunConfig& c, std::string_view v, const std::string& w) {
                   c.scenario.cw_min_max = parse_integer<std::int64_t>("cw_min_max", v, w);
                 },
                 [](const RunConfig& c) { return std::to_string(c.scenario.cw_min_max); }});
    t.push_back({"retry_limit_max", true,
                 [](RunConfig& c, std::string_view v, const std::string& w) {
                   c.scenario.retry_limit_max = parse_integer<int>("retry_limit_max", v, w);
                 },
                 [](const RunConfig& c) { return std::to_string(c.scenario.retry_limit_max); }});
    t.push_back({"payload_bytes", true,
                 [](RunConfig& c, std::string_view v, const std::string& w) {
                   const auto bytes = parse_integer<std::int64_t>("payload_bytes", v, w);
                   if (bytes > (std::int64_t{1} << 40))
                     throw ConfigError("bad-value", w, "payload_bytes: too large");
                   c.timing.payload_bits = bytes * 8;
                 },
                 [](const RunConfig& c) {
                   return c.timing.payload_bits % 8 == 0
                              ? std::to_string(c.timing.payload_bits / 8)
                              : format_number(static_cast<double>(c.timing.payload_bits) / 8.0);
                 }});
    t.push_back({"rate_bps", true,
                 [](RunConfig& c, std::string_view v, const std::string& w) {
                   c.timing.channel_rate_bit_per_us = parse_real("rate_bps", v, w) * 1e-6;
                 },
                 [](const RunConfig& c) {
                   return format_number(c.timing.channel_rate_bit_per_us * 1e6);
                 }});
    t.push_back(REAL_FIELD("idle_slot_us", c.timing.idle_slot_us));
    t.push_back(REAL_FIELD("sifs_us", c.timing.sifs_us));
    t.push_back(REAL_FIELD("difs_us", c.timing.difs_us));
    t.push_back(REAL_FIELD("header_us", c.timing.header_us));
    t.push_back(REAL_FIELD("ack_us", c.timing.ack_us));
    t.push_back(REAL_FIELD("rts_us", c.timing.rts_us));
    t.push_back(REAL_FIELD("cts_us", c.timing.cts_us));
    t.push_back(REAL_FIELD("ack_timeout_us", c.timing.ack_timeout_us));
    t.push_back(REAL_FIELD("cts_timeout_us", c.timing.cts_timeout_us));
    t.push_back({"seed", false,
                 [](RunConfig& c, std::string_view v, const std::string& w) {
                   c.seed = parse_integer<std::uint64_t>("seed", v, w);
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    t.push_back({"replications", false,
                 [](RunConfig& c, std::string_view v, const std::string& w) {
                   c.replications = parse_integer<int>("replications", v, w);
                 },
                 [](const RunConfig& c) { return std::to_string(c.replications); }});
    t.push_back(KeySpec{"sim_duration_s", false,
                        [](RunConfig& c, std::string_view v, const std::string& w) {
                          c.sim_duration_s = parse_real("sim_duration_s", v, w);
                        },
                        [](const RunConfig& c) { return format_number(c.sim_duration_s); }});
    return t;
  }();
  return table;
}

#undef REAL_FIELD

const KeySpec* find_spec(std::string_view key) {
  for (const auto& s : specs()) {
    if (s.name == key) return &s;
  }
  return nullptr;
}

// Validation reports internal field names; map them back to config keys.
std::string key_of_field(const std::string& field) {
  if (field == "density") return "density_per_km2";
  if (field == "rate") return "rate_bps";
  if (field == "payload") return "payload_bytes";
  return field;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& s : specs()) k.push_back(s.name);
    return k;
  }();
  return keys;
}

const std::vector<std::string>& echo_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& s : specs()) {
      if (s.echoed) k.push_back(s.name);
    }
    return k;
  }();
  return keys;
}

bool is_config_key(std::string_view key) { return find_spec(key) != nullptr; }

void set_value(RunConfig& config, std::string_view key, std::string_view value,
               const std::string& where) {
  const KeySpec* spec = find_spec(key);
  if (!spec) throw ConfigError("unknown-key", where, "unknown key '" + std::string(key) + "'");
  spec->set(config, trim(value), where);
}

std::string get_value(const RunConfig& config, std::string_view key) {
  const KeySpec* spec = find_spec(key);
  if (!spec) throw ConfigError("unknown-key", "", "unknown key '" + std::string(key) + "'");
  return spec->get(config);
}

void ConfigBuilder::set(std::string_view key, std::string_view value, const std::string& where) {
  set_value(config_, key, value, where);
  origin_[std::string(key)] = where;
}

void ConfigBuilder::parse_text(std::string_view text, const std::string& source) {
  std::map<std::string, int, std::less<>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line_no == 1 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("parse-error", where, "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("parse-error", where, "missing key before '='");
    if (!is_config_key(key))
      throw ConfigError("unknown-key", where, "unknown key '" + std::string(key) + "'");
    if (auto it = seen.find(key); it != seen.end()) {
      throw ConfigError("duplicate-key", where,
                        "key '" + std::string(key) + "' already set on line " +
                            std::to_string(it->second));
    }
    seen.emplace(std::string(key), line_no);
    set(key, value, where);
  }
}

void ConfigBuilder::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("unreadable-file", path, "cannot open config file");
  std::ostringstream os;
  os << in.rdbuf();
  parse_text(os.str(), path);
}

RunConfig ConfigBuilder::build() const {
  const auto errors = validate(config_.scenario, config_.timing);
  if (!errors.empty()) {
    const auto& e = errors.front();
    const std::string key = key_of_field(e.field);
    const auto it = origin_.find(key);
    std::string message = key + ": " + e.message;
    for (std::size_t i = 1; i < errors.size(); ++i) {
      message += "; " + key_of_field(errors[i].field) + ": " + errors[i].message;
    }
    throw ConfigError(std::string(to_string(e.code)), it == origin_.end() ? "" : it->second,
                      message);
  }
  auto where_of = [this](const char* key) {
    const auto it = origin_.find(key);
    return it == origin_.end() ? std::string() : it->second;
  };
  if (config_.replications < 1)
    throw ConfigError("bad-replications", where_of("replications"), "replications must be >= 1");
  if (config_.sim_duration_s < 0.0)
    throw ConfigError("bad-duration", where_of("sim_duration_s"), "sim_duration_s must be >= 0");
  return config_;
}

RunConfig load_config(const std::string& path) {
  ConfigBuilder b;
  b.load_file(path);
  return b.build();
}

}  // namespace uavmac::cli
