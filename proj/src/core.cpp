#include "uavmac/core.hpp"

#include <cmath>
#include <sstream>

namespace uavmac {

std::string_view to_string(Mechanism m) {
  return m == Mechanism::basic ? "basic" : "rts_cts";
}

std::string_view to_string(Variant v) {
  return v == Variant::conventional ? "conventional" : "modified";
}

Mechanism parse_mechanism(std::string_view text) {
  if (text == "basic") return Mechanism::basic;
  if (text == "rts_cts" || text == "rts") return Mechanism::rts_cts;
  throw Error("bad-mechanism", "unknown mechanism '" + std::string(text) + "' (basic|rts_cts)");
}

Variant parse_variant(std::string_view text) {
  if (text == "conventional") return Variant::conventional;
  if (text == "modified") return Variant::modified;
  throw Error("bad-variant",
              "unknown variant '" + std::string(text) + "' (conventional|modified)");
}

std::string_view to_string(ValidationCode code) {
  switch (code) {
    case ValidationCode::nonpositive_radius: return "nonpositive-radius";
    case ValidationCode::nonpositive_speed: return "nonpositive-speed";
    case ValidationCode::negative_density: return "negative-density";
    case ValidationCode::zero_window: return "zero-window";
    case ValidationCode::window_too_large: return "window-too-large";
    case ValidationCode::negative_retry_limit: return "negative-retry-limit";
    case ValidationCode::retry_limit_too_large: return "retry-limit-too-large";
    case ValidationCode::nonpositive_idle_slot: return "nonpositive-idle-slot";
    case ValidationCode::nonpositive_rate: return "nonpositive-rate";
    case ValidationCode::negative_duration: return "negative-duration";
    case ValidationCode::negative_payload: return "negative-payload";
    case ValidationCode::nonfinite_value: return "nonfinite-value";
    case ValidationCode::bad_fixed_point_eps: return "bad-fixed-point-eps";
    case ValidationCode::bad_damping: return "bad-damping";
    case ValidationCode::bad_max_iterations: return "bad-max-iterations";
    case ValidationCode::bad_tail_eps: return "bad-tail-eps";
  }
  return "unknown";
}

namespace {

void push(std::vector<ValidationError>& out, ValidationCode code, std::string field,
          std::string message) {
  out.push_back({code, std::move(field), std::move(message)});
}

bool finite_or_push(std::vector<ValidationError>& out, double value, const char* field) {
  if (std::isfinite(value)) return true;
  push(out, ValidationCode::nonfinite_value, field, std::string(field) + " is not finite");
  return false;
}

void check_window(std::vector<ValidationError>& out, std::int64_t w, const char* field) {
  if (w < 1) push(out, ValidationCode::zero_window, field, std::string(field) + " must be >= 1");
}

void check_retry(std::vector<ValidationError>& out, int j, const char* field) {
  if (j < 0) {
    push(out, ValidationCode::negative_retry_limit, field, std::string(field) + " must be >= 0");
  } else if (j > kMaxRetryLimit) {
    push(out, ValidationCode::retry_limit_too_large, field,
         std::string(field) + " must be <= " + std::to_string(kMaxRetryLimit));
  }
}

}  // namespace

std::vector<ValidationError> validate(const ScenarioConfig& s) {
  std::vector<ValidationError> out;
  if (finite_or_push(out, s.radius_m, "radius_m") && !(s.radius_m > 0.0))
    push(out, ValidationCode::nonpositive_radius, "radius_m", "radius_m must be > 0");
  if (finite_or_push(out, s.speed_mps, "speed_mps") && !(s.speed_mps > 0.0))
    push(out, ValidationCode::nonpositive_speed, "speed_mps", "speed_mps must be > 0");
  if (finite_or_push(out, s.density_per_m2, "density") && s.density_per_m2 < 0.0)
    push(out, ValidationCode::negative_density, "density", "density must be >= 0");
  check_window(out, s.cw_min, "cw_min");
  check_window(out, s.cw_min_max, "cw_min_max");
  check_retry(out, s.retry_limit, "retry_limit");
  check_retry(out, s.retry_limit_max, "retry_limit_max");
  // 2^J * W must fit comfortably in 64 bits.
  if (s.cw_min >= 1 && s.cw_min > (std::int64_t{1} << 24))
    push(out, ValidationCode::window_too_large, "cw_min", "cw_min must be <= 2^24");
  if (s.cw_min_max >= 1 && s.cw_min_max > (std::int64_t{1} << 24))
    push(out, ValidationCode::window_too_large, "cw_min_max", "cw_min_max must be <= 2^24");
  return out;
}

std::vector<ValidationError> validate(const MacTiming& t) {
  std::vector<ValidationError> out;
  const std::pair<double, const char*> durations[] = {
      {t.sifs_us, "sifs_us"},         {t.difs_us, "difs_us"},
      {t.header_us, "header_us"},     {t.ack_us, "ack_us"},
      {t.rts_us, "rts_us"},           {t.cts_us, "cts_us"},
      {t.ack_timeout_us, "ack_timeout_us"}, {t.cts_timeout_us, "cts_timeout_us"},
  };
  for (const auto& [value, field] : durations) {
    if (finite_or_push(out, value, field) && value < 0.0)
      push(out, ValidationCode::negative_duration, field, std::string(field) + " must be >= 0");
  }
  if (finite_or_push(out, t.idle_slot_us, "idle_slot_us") && !(t.idle_slot_us > 0.0))
    push(out, ValidationCode::nonpositive_idle_slot, "idle_slot_us", "idle_slot_us must be > 0");
  if (finite_or_push(out, t.channel_rate_bit_per_us, "rate") && !(t.channel_rate_bit_per_us > 0.0))
    push(out, ValidationCode::nonpositive_rate, "rate", "channel rate must be > 0");
  if (t.payload_bits < 0)
    push(out, ValidationCode::negative_payload, "payload", "payload size must be >= 0");
  return out;
}

std::vector<ValidationError> validate(const Tolerances& tol) {
  std::vector<ValidationError> out;
  if (!(tol.fixed_point_eps > 0.0))
    push(out, ValidationCode::bad_fixed_point_eps, "fixed_point_eps", "fixed_point_eps must be > 0");
  if (!(tol.damping > 0.0 && tol.damping <= 1.0))
    push(out, ValidationCode::bad_damping, "damping", "damping must lie in (0, 1]");
  if (tol.max_iterations < 1)
    push(out, ValidationCode::bad_max_iterations, "max_iterations", "max_iterations must be >= 1");
  if (!(tol.pmf_tail_eps > 0.0 && tol.pmf_tail_eps < 1.0))
    push(out, ValidationCode::bad_tail_eps, "pmf_tail_eps", "pmf_tail_eps must lie in (0, 1)");
  return out;
}

std::vector<ValidationError> validate(const ScenarioConfig& scenario, const MacTiming& timing) {
  auto out = validate(scenario);
  auto more = validate(timing);
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

namespace {

std::string summarize(const std::vector<ValidationError>& errors) {
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& e : errors) os << ' ' << to_string(e.code) << " (" << e.message << ");";
  return os.str();
}

}  // namespace

ValidationFailure::ValidationFailure(std::vector<ValidationError> errors)
    : Error(errors.empty() ? "invalid" : std::string(to_string(errors.front().code)),
            summarize(errors)),
      errors_(std::move(errors)) {}

void require_valid(const ScenarioConfig& scenario, const MacTiming& timing) {
  auto errors = validate(scenario, timing);
  if (!errors.empty()) throw ValidationFailure(std::move(errors));
}

}  // namespace uavmac
