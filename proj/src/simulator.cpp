#include "uavmac/simulator.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <string>

#include "uavmac/parallel.hpp"
#include "uavmac/timing.hpp"

namespace uavmac {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<Device> generate_devices(double density, double radius, double strip, Rng& rng) {
  if (density < 0.0) throw Error("negative-density", "density must be >= 0");
  std::vector<Device> out;
  const double mean = density * strip * 2.0 * radius;
  if (mean <= 0.0) return out;
  std::poisson_distribution<std::int64_t> count(mean);
  const std::int64_t n = count(rng);
  std::uniform_real_distribution<double> ux(0.0, strip);
  std::uniform_real_distribution<double> uy(-radius, radius);
  out.resize(static_cast<std::size_t>(n));
  for (auto& d : out) {
    d.x = ux(rng);
    d.y = uy(rng);
  }
  return out;
}

void assign_protocol(Device& device, const ScenarioConfig& scenario,
                     const ClusterPartition* partition, const Allocation* alloc) {
  device.cluster = partition ? partition->cluster_of(device.y) : 0;
  if (scenario.variant == Variant::conventional || alloc == nullptr) {
    device.cw_min = scenario.cw_min;
    device.retry_limit = scenario.retry_limit;
    return;
  }
  const auto slot = static_cast<std::size_t>(std::max(device.cluster, 1) - 1);
  device.cw_min = alloc->cw_min.at(slot);
  device.retry_limit = alloc->retry_limit.at(slot);
}

double SimConfig::warmup() const {
  return warmup_s.value_or(2.0 * scenario.radius_m / scenario.speed_mps);
}

double SimConfig::duration() const {
  if (sim_duration_s > 0.0) return sim_duration_s;
  return warmup() + 2.0 * (2.0 * scenario.radius_m / scenario.speed_mps);
}

double SimConfig::strip_length() const {
  return strip_length_m.value_or(scenario.speed_mps * duration() + 4.0 * scenario.radius_m);
}

namespace {

enum class Status : unsigned char { waiting, active, gone };

std::int64_t to_us(double value) { return std::llround(value); }

}  // namespace

ReplicationResult simulate(std::vector<Device> devices, const Flight& flight,
                           const ScenarioConfig& scenario, const MacTiming& timing,
                           int n_clusters, Rng& rng, bool check_invariants) {
  std::sort(devices.begin(), devices.end(), [](const Device& a, const Device& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  const SlotDurations slots = slot_durations(scenario.mechanism, timing);
  const std::int64_t idle_us = to_us(timing.idle_slot_us);
  const std::int64_t success_us = to_us(slots.success_us);
  const std::int64_t collision_us = to_us(slots.collision_us);
  const std::int64_t timeout_us = to_us(slots.timeout_us);
  const std::int64_t end_us = to_us(flight.duration_s * 1e6);
  const std::int64_t warm_us = to_us(flight.warmup_s * 1e6);
  const double r2 = flight.radius_m * flight.radius_m;

  const std::size_t n = devices.size();
  std::vector<Status> status(n, Status::waiting);
  std::vector<std::int64_t> blocked_until(n, 0);
  std::vector<std::size_t> slot_of(n, 0);
  std::vector<std::size_t> active;
  std::vector<std::size_t> senders;

  ReplicationResult res;
  res.devices = static_cast<std::int64_t>(n);
  res.cluster_successes.assign(static_cast<std::size_t>(std::max(n_clusters, 0)) + 1, 0);
  SimAudit& audit = res.audit;

  auto draw = [&rng](std::int64_t window) {
    return std::uniform_int_distribution<std::int64_t>(0, window - 1)(rng);
  };
  auto new_packet = [&](Device& d) {
    d.stage = 0;
    d.counter = draw(d.cw_min);
    ++audit.packets_started;
    ++audit.rounds_started;
  };

  std::size_t lo = 0, hi = 0;
  std::int64_t t = 0;
  std::int64_t measure_start = -1;
  std::int64_t measured_successes = 0;

  while (t < end_us) {
    const bool measuring = t >= warm_us;
    if (measuring && measure_start < 0) measure_start = t;
    const double cx = flight.start_x_m + flight.speed_mps * static_cast<double>(t) * 1e-6;

    // Coverage is re-evaluated only at slot boundaries.
    while (hi < n && devices[hi].x <= cx + flight.radius_m) ++hi;
    for (std::size_t i = lo; i < hi; ++i) {
      if (status[i] == Status::gone) continue;
      const double dx = devices[i].x - cx;
      const bool inside = dx * dx + devices[i].y * devices[i].y <= r2;
      if (status[i] == Status::waiting && inside) {
        status[i] = Status::active;
        devices[i].in_coverage = true;
        blocked_until[i] = 0;
        new_packet(devices[i]);
        slot_of[i] = active.size();
        active.push_back(i);
      } else if (status[i] == Status::active && !inside) {
        status[i] = Status::gone;
        devices[i].in_coverage = false;
        ++audit.quits;
        if (measuring) ++res.quits;
        const std::size_t last = active.back();
        active[slot_of[i]] = last;
        slot_of[last] = slot_of[i];
        active.pop_back();
      } else if (status[i] == Status::waiting && dx < -flight.radius_m) {
        status[i] = Status::gone;  // the disk has passed without ever covering it
      }
    }
    while (lo < hi && status[lo] == Status::gone) ++lo;

    senders.clear();
    for (const std::size_t i : active) {
      if (devices[i].counter == 0 && blocked_until[i] <= t) senders.push_back(i);
    }

    if (senders.empty()) {
      for (const std::size_t i : active) {
        if (blocked_until[i] <= t && devices[i].counter > 0) --devices[i].counter;
      }
      ++audit.idle_slots;
      t += idle_us;
    } else if (senders.size() == 1) {
      Device& d = devices[senders.front()];
      ++audit.successes;
      if (measuring) {
        ++res.successes;
        ++measured_successes;
        ++res.cluster_successes[static_cast<std::size_t>(d.cluster)];
      }
      new_packet(d);
      t += success_us;
    } else {
      ++audit.collision_events;
      if (measuring) ++res.collisions;
      for (const std::size_t i : senders) {
        Device& d = devices[i];
        ++audit.collision_participations;
        if (d.stage >= d.retry_limit) {
          ++audit.drops;
          if (measuring) ++res.drops;
          new_packet(d);
        } else {
          ++d.stage;
          d.counter = draw(d.cw_min << d.stage);
          ++audit.rounds_started;
        }
        blocked_until[i] = t + collision_us + timeout_us;
      }
      t += collision_us;
    }

    if (check_invariants) {
      for (const std::size_t i : active) {
        const Device& d = devices[i];
        if (d.stage < 0 || d.stage > d.retry_limit || d.counter < 0 ||
            d.counter >= (d.cw_min << d.stage)) {
          throw Error("invariant-violation", "device backoff state left its legal range");
        }
      }
    }
  }

  audit.pending = static_cast<std::int64_t>(active.size());
  audit.elapsed_us = t;
  if (measure_start >= 0 && t > measure_start) {
    res.measured_us = t - measure_start;
    res.throughput = static_cast<double>(measured_successes) * timing.payload_us() /
                     static_cast<double>(res.measured_us);
  }
  return res;
}

std::optional<double> ci95_half_width(const std::vector<double>& samples) {
  const std::size_t n = samples.size();
  if (n < 2) return std::nullopt;
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  return boost::math::quantile(dist, 0.975) * sd / std::sqrt(static_cast<double>(n));
}

SimReport run(const SimConfig& config) {
  require_valid(config.scenario, config.timing);
  const auto& sc = config.scenario;
  if (config.replications < 1) throw Error("bad-replications", "replications must be >= 1");
  const double turnover = 2.0 * sc.radius_m / sc.speed_mps;
  const double warmup = config.warmup();
  const double duration = config.duration();
  if (!(warmup >= turnover * (1.0 - 1e-12)))
    throw Error("bad-warmup", "warmup must cover one full coverage turnover (2R/v = " +
                                  std::to_string(turnover) + " s)");
  if (!(duration > warmup))
    throw Error("bad-duration", "sim_duration_s must exceed the warmup (" +
                                    std::to_string(warmup) + " s)");

  SimReport report;
  report.delta_s = config.delta_s > 0.0
                       ? config.delta_s
                       : initial_traversal_time(sc, config.timing, DeltaMode::contention_free);
  std::optional<ClusterPartition> part;
  try {
    part = partition(sc.radius_m, sc.speed_mps, report.delta_s);
  } catch (const Error& e) {
    // Conventional devices need no cluster; the modified protocol does.
    if (e.code() != "no-cluster" || sc.variant == Variant::modified) throw;
  }
  report.n_clusters = part ? part->size() : 0;
  std::optional<Allocation> alloc;
  if (part && sc.variant == Variant::modified) alloc = allocation(sc, part->size());

  Flight flight;
  flight.radius_m = sc.radius_m;
  flight.speed_mps = sc.speed_mps;
  flight.start_x_m = 2.0 * sc.radius_m;
  flight.duration_s = duration;
  flight.warmup_s = warmup;
  const double strip = config.strip_length();

  const auto reps = static_cast<std::size_t>(config.replications);
  report.replications.resize(reps);
  parallel_for(
      reps,
      [&](std::size_t r) {
        const std::uint64_t seed = mix_seed(config.seed, r);
        Rng rng(seed);
        auto devices = generate_devices(sc.density_per_m2, sc.radius_m, strip, rng);
        for (auto& d : devices) {
          assign_protocol(d, sc, part ? &*part : nullptr, alloc ? &*alloc : nullptr);
        }
        auto result = simulate(std::move(devices), flight, sc, config.timing, report.n_clusters,
                               rng, config.check_invariants);
        result.seed = seed;
        report.replications[r] = std::move(result);
      },
      config.workers);

  std::vector<double> samples;
  samples.reserve(reps);
  report.cluster_successes.assign(static_cast<std::size_t>(report.n_clusters) + 1, 0);
  for (const auto& r : report.replications) {
    samples.push_back(r.throughput);
    report.successes += r.successes;
    report.collisions += r.collisions;
    report.drops += r.drops;
    report.quits += r.quits;
    for (std::size_t c = 0; c < r.cluster_successes.size(); ++c)
      report.cluster_successes[c] += r.cluster_successes[c];
  }
  report.throughput = std::accumulate(samples.begin(), samples.end(), 0.0) /
                      static_cast<double>(samples.size());
  report.ci95 = ci95_half_width(samples);
  return report;
}

}  // namespace uavmac
