#ifndef UAVMAC_TIMING_HPP
#define UAVMAC_TIMING_HPP

#include <cstdint>

#include "uavmac/core.hpp"

namespace uavmac {

/// Channel occupancy, in microseconds, of a successful exchange (T_s), a
/// collision (T_c) and the post-collision wait of the colliders (T_o).
/// T_s >= T_c holds for basic access but not for RTS/CTS.
struct SlotDurations {
  double success_us = 0.0;
  double collision_us = 0.0;
  double timeout_us = 0.0;
  Mechanism mechanism = Mechanism::basic;
};

[[nodiscard]] double success_duration(Mechanism mechanism, const MacTiming& timing);
[[nodiscard]] double collision_duration(Mechanism mechanism, const MacTiming& timing);
[[nodiscard]] double timeout_duration(Mechanism mechanism, const MacTiming& timing);
[[nodiscard]] SlotDurations slot_durations(Mechanism mechanism, const MacTiming& timing);

/// Mean number of backoff slots drawn over a full pass through stages
/// 0..retry_limit: sum of (2^j W_0 - 1) / 2.
[[nodiscard]] double expected_backoff_total(std::int64_t cw_min, int retry_limit);

/// Mean number of frozen slots accompanying `backoff_slots` decrements when
/// each slot is busy with probability q. Throws "divergent-freeze" for q >= 1.
[[nodiscard]] double expected_freeze(double backoff_slots, double busy_prob);

/// Network-level inputs to the traversal time. `any_tx_prob` is the
/// probability that at least one device transmits in a slot.
struct TraversalInputs {
  double busy_prob = 0.0;
  double success_prob = 0.0;
  double any_tx_prob = 0.0;
  std::int64_t cw_min = 8;
  int retry_limit = 7;
};

/// Expected time, in microseconds, for one packet to pass through every
/// backoff stage:
///   E(B) δ + E(F) [ (P_s/P_b) T_s + ((P_b - P_s)/P_b) T_c ] + J (T_c + T_o).
/// The busy-slot mixture is dropped when q = 0. With P_b = 0 and q > 0 the
/// mixture is undefined and "undefined-mixture" is thrown.
[[nodiscard]] double traversal_time(const TraversalInputs& inputs, const SlotDurations& slots,
                                    double idle_slot_us);

}  // namespace uavmac

#endif  // UAVMAC_TIMING_HPP
