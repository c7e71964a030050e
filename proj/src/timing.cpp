#include "uavmac/timing.hpp"

#include <cmath>
#include <string>

namespace uavmac {

double success_duration(Mechanism mechanism, const MacTiming& t) {
  if (mechanism == Mechanism::basic) {
    return t.header_us + t.payload_us() + t.sifs_us + t.ack_us + t.difs_us + 2.0 * t.idle_slot_us;
  }
  return t.rts_us + t.cts_us + t.header_us + t.payload_us() + 3.0 * t.sifs_us + t.ack_us +
         t.difs_us;
}

double collision_duration(Mechanism mechanism, const MacTiming& t) {
  if (mechanism == Mechanism::basic) {
    return t.header_us + t.payload_us() + t.difs_us + t.idle_slot_us;
  }
  return t.rts_us + t.sifs_us + t.ack_us + t.difs_us;
}

double timeout_duration(Mechanism mechanism, const MacTiming& t) {
  return t.sifs_us + (mechanism == Mechanism::basic ? t.ack_timeout_us : t.cts_timeout_us);
}

SlotDurations slot_durations(Mechanism mechanism, const MacTiming& timing) {
  return {success_duration(mechanism, timing), collision_duration(mechanism, timing),
          timeout_duration(mechanism, timing), mechanism};
}

double expected_backoff_total(std::int64_t cw_min, int retry_limit) {
  if (cw_min < 1) throw Error("zero-window", "cw_min must be >= 1");
  if (retry_limit < 0 || retry_limit > kMaxRetryLimit)
    throw Error("bad-retry-limit", "retry limit out of range");
  double total = 0.0;
  for (int j = 0; j <= retry_limit; ++j) {
    total += (std::ldexp(static_cast<double>(cw_min), j) - 1.0) / 2.0;
  }
  return total;
}

double expected_freeze(double backoff_slots, double busy_prob) {
  if (!(busy_prob < 1.0)) {
    throw Error("divergent-freeze",
                "busy probability " + std::to_string(busy_prob) + " >= 1: counter never resumes");
  }
  if (busy_prob < 0.0) throw Error("bad-probability", "busy probability must be >= 0");
  return backoff_slots * busy_prob / (1.0 - busy_prob);
}

double traversal_time(const TraversalInputs& in, const SlotDurations& slots, double idle_slot_us) {
  if (!(in.busy_prob >= 0.0 && in.busy_prob < 1.0))
    throw Error("bad-probability", "busy probability must lie in [0, 1)");
  if (!(in.any_tx_prob >= 0.0 && in.any_tx_prob <= 1.0))
    throw Error("bad-probability", "transmission probability must lie in [0, 1]");
  if (!(in.success_prob >= 0.0 && in.success_prob <= in.any_tx_prob))
    throw Error("bad-probability", "success probability must lie in [0, P_b]");

  const double backoff = expected_backoff_total(in.cw_min, in.retry_limit);
  const double freeze = expected_freeze(backoff, in.busy_prob);

  double busy_mixture = 0.0;
  if (in.any_tx_prob > 0.0) {
    const double success_share = in.success_prob / in.any_tx_prob;
    busy_mixture = success_share * slots.success_us + (1.0 - success_share) * slots.collision_us;
  } else if (in.busy_prob > 0.0) {
    throw Error("undefined-mixture",
                "no device ever transmits (P_b = 0) yet the channel is busy (q > 0)");
  }
  return backoff * idle_slot_us + freeze * busy_mixture +
         in.retry_limit * (slots.collision_us + slots.timeout_us);
}

}  // namespace uavmac
