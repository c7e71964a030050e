#ifndef UAVMAC_CORE_HPP
#define UAVMAC_CORE_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uavmac {

enum class Mechanism { basic, rts_cts };
enum class Variant { conventional, modified };

std::string_view to_string(Mechanism m);
std::string_view to_string(Variant v);
Mechanism parse_mechanism(std::string_view text);
Variant parse_variant(std::string_view text);

/// Frame and slot time constants, all in microseconds. Defaults are the
/// 1 Mbit/s, 8 KiB-payload parameter set used throughout the experiments.
struct MacTiming {
  double idle_slot_us = 50.0;
  double sifs_us = 28.0;
  double difs_us = 128.0;
  double header_us = 400.0;  // 272-bit MAC + 128-bit PHY header at 1 Mbit/s
  double ack_us = 112.0;
  double rts_us = 160.0;
  double cts_us = 112.0;
  double ack_timeout_us = 300.0;
  double cts_timeout_us = 300.0;
  double channel_rate_bit_per_us = 1.0;
  std::int64_t payload_bits = 65536;

  /// T_E, the payload airtime. Derived, so it can never disagree with the
  /// bit count and the rate.
  [[nodiscard]] double payload_us() const {
    return static_cast<double>(payload_bits) / channel_rate_bit_per_us;
  }
};

struct ScenarioConfig {
  double radius_m = 1000.0;
  double speed_mps = 10.0;
  double density_per_m2 = 50e-6;  // 50 devices per km^2
  Mechanism mechanism = Mechanism::basic;
  Variant variant = Variant::conventional;
  std::int64_t cw_min = 8;
  int retry_limit = 7;
  std::int64_t cw_min_max = 8;
  int retry_limit_max = 7;

  /// Initial window and retry limit that apply before any per-cluster
  /// allocation: (W_0, J) for conventional, (CW_min^max, J_max) for modified.
  [[nodiscard]] std::int64_t base_window() const {
    return variant == Variant::conventional ? cw_min : cw_min_max;
  }
  [[nodiscard]] int base_retry_limit() const {
    return variant == Variant::conventional ? retry_limit : retry_limit_max;
  }
};

struct Tolerances {
  double fixed_point_eps = 1e-9;
  int max_iterations = 10000;
  double pmf_tail_eps = 1e-12;
  double damping = 0.5;
};

// Retry limits above this would overflow 2^J * W in 64-bit windows.
inline constexpr int kMaxRetryLimit = 32;

enum class ValidationCode {
  nonpositive_radius,
  nonpositive_speed,
  negative_density,
  zero_window,
  window_too_large,
  negative_retry_limit,
  retry_limit_too_large,
  nonpositive_idle_slot,
  nonpositive_rate,
  negative_duration,
  negative_payload,
  nonfinite_value,
  bad_fixed_point_eps,
  bad_damping,
  bad_max_iterations,
  bad_tail_eps,
};

std::string_view to_string(ValidationCode code);

struct ValidationError {
  ValidationCode code;
  std::string field;  // name of the offending field
  std::string message;
};

[[nodiscard]] std::vector<ValidationError> validate(const ScenarioConfig& scenario);
[[nodiscard]] std::vector<ValidationError> validate(const MacTiming& timing);
[[nodiscard]] std::vector<ValidationError> validate(const Tolerances& tolerances);
[[nodiscard]] std::vector<ValidationError> validate(const ScenarioConfig& scenario,
                                                    const MacTiming& timing);

/// Base class of every error the library raises. `code()` is a short,
/// stable, machine-readable identifier such as "no-cluster".
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  [[nodiscard]] const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class ValidationFailure : public Error {
 public:
  explicit ValidationFailure(std::vector<ValidationError> errors);
  [[nodiscard]] const std::vector<ValidationError>& errors() const noexcept { return errors_; }

 private:
  std::vector<ValidationError> errors_;
};

/// Throws ValidationFailure carrying every violated invariant.
void require_valid(const ScenarioConfig& scenario, const MacTiming& timing);

}  // namespace uavmac

#endif  // UAVMAC_CORE_HPP
