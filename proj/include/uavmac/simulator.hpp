#ifndef UAVMAC_SIMULATOR_HPP
#define UAVMAC_SIMULATOR_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "uavmac/analytic.hpp"
#include "uavmac/core.hpp"
#include "uavmac/geometry.hpp"

namespace uavmac {

using Rng = std::mt19937_64;

/// SplitMix64 finaliser; turns (seed, replication) into a stream seed.
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

struct Device {
  double x = 0.0;
  double y = 0.0;
  int cluster = 0;  // 1..N, 0 on the m = 0 rim
  std::int64_t cw_min = 8;
  int retry_limit = 7;
  int stage = 0;
  std::int64_t counter = 0;
  bool in_coverage = false;
};

/// Homogeneous Poisson field of intensity `density` on [0, strip] x [-R, R].
[[nodiscard]] std::vector<Device> generate_devices(double density, double radius, double strip,
                                                   Rng& rng);

/// Stamps (cluster, cw_min, retry_limit) on a device. Rim devices take the
/// cluster-1 parameters under the modified protocol.
void assign_protocol(Device& device, const ScenarioConfig& scenario,
                     const ClusterPartition* partition, const Allocation* alloc);

struct SimConfig {
  ScenarioConfig scenario;
  MacTiming timing;
  double sim_duration_s = 0.0;           // 0: warmup + 2 turnovers
  std::optional<double> warmup_s;        // default 2R/v
  std::optional<double> strip_length_m;  // default v * duration + 4R
  std::uint64_t seed = 1;
  int replications = 10;
  double delta_s = 0.0;  // traversal time for the cluster cut; 0: contention-free
  bool check_invariants = false;
  unsigned workers = 0;

  [[nodiscard]] double warmup() const;
  [[nodiscard]] double duration() const;
  [[nodiscard]] double strip_length() const;
};

/// Counts over the whole run, for the conservation audits.
struct SimAudit {
  std::int64_t packets_started = 0;
  std::int64_t rounds_started = 0;
  std::int64_t successes = 0;
  std::int64_t collision_events = 0;
  std::int64_t collision_participations = 0;
  std::int64_t drops = 0;
  std::int64_t quits = 0;
  std::int64_t pending = 0;
  std::int64_t idle_slots = 0;
  std::int64_t elapsed_us = 0;
};

struct ReplicationResult {
  std::uint64_t seed = 0;
  double throughput = 0.0;
  std::int64_t measured_us = 0;
  std::int64_t devices = 0;
  // counts inside the measurement window
  std::int64_t successes = 0;
  std::int64_t collisions = 0;
  std::int64_t drops = 0;
  std::int64_t quits = 0;
  std::vector<std::int64_t> cluster_successes;  // index 0 is the rim
  SimAudit audit;
};

struct SimReport {
  double throughput = 0.0;  // mean over replications
  std::optional<double> ci95;
  std::int64_t successes = 0;
  std::int64_t collisions = 0;
  std::int64_t drops = 0;
  std::int64_t quits = 0;
  std::vector<std::int64_t> cluster_successes;
  std::vector<ReplicationResult> replications;
  double delta_s = 0.0;
  int n_clusters = 0;
};

/// Where the disk starts and how long and how far it flies.
struct Flight {
  double radius_m = 1000.0;
  double speed_mps = 10.0;
  double start_x_m = 0.0;
  double duration_s = 0.0;
  double warmup_s = 0.0;
};

/// One run over an explicit device field. `rng` drives every backoff draw.
[[nodiscard]] ReplicationResult simulate(std::vector<Device> devices, const Flight& flight,
                                         const ScenarioConfig& scenario, const MacTiming& timing,
                                         int n_clusters, Rng& rng, bool check_invariants = false);

/// Half-width of the 95% Student-t interval of the mean; empty for n < 2.
[[nodiscard]] std::optional<double> ci95_half_width(const std::vector<double>& samples);

/// Validates, generates a device field per replication and simulates.
[[nodiscard]] SimReport run(const SimConfig& config);

}  // namespace uavmac

#endif  // UAVMAC_SIMULATOR_HPP
