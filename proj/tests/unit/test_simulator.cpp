#include <doctest.h>

#include <cmath>

#include "uavmac/simulator.hpp"

using namespace uavmac;

namespace {

// Everything ever started is finished, dropped, abandoned or still pending.
void check_conservation(const SimAudit& a) {
  CHECK(a.packets_started == a.successes + a.drops + a.quits + a.pending);
  CHECK(a.rounds_started == a.successes + a.collision_participations + a.quits + a.pending);
  CHECK(a.collision_participations >= 2 * a.collision_events);
}

void check_elapsed(const SimAudit& a, Mechanism mech) {
  const MacTiming t;
  const auto s = slot_durations(mech, t);
  CHECK(a.idle_slots * std::llround(t.idle_slot_us) + a.successes * std::llround(s.success_us) +
            a.collision_events * std::llround(s.collision_us) ==
        a.elapsed_us);
}

SimConfig small_config(Mechanism mech, Variant var) {
  SimConfig c;
  c.scenario.speed_mps = 50.0;
  c.scenario.mechanism = mech;
  c.scenario.variant = var;
  c.replications = 3;
  c.seed = 11;
  return c;
}

}  // namespace

TEST_CASE("no devices means no throughput") {
  SimConfig c;
  c.scenario.density_per_m2 = 0.0;
  c.scenario.speed_mps = 50.0;
  c.replications = 2;
  const auto r = run(c);
  CHECK(r.throughput == 0.0);
  CHECK(r.successes == 0);
  for (const auto& rep : r.replications) CHECK(rep.devices == 0);
}

TEST_CASE("single saturated device") {
  const MacTiming t;
  ScenarioConfig s;
  Flight f;
  f.radius_m = 1000.0;
  f.speed_mps = 1e-3;
  f.duration_s = 600.0;
  Device d;
  d.x = 0.0;
  d.y = 0.0;
  Rng rng(5);
  const auto r = simulate({d}, f, s, t, 0, rng, true);

  // one success per (mean backoff + T_s), no collisions ever
  const double expected = 65536.0 / (3.5 * 50.0 + 66304.0);
  CHECK(r.throughput == doctest::Approx(expected).epsilon(0.01));
  CHECK(r.collisions == 0);
  CHECK(r.drops == 0);

  // idle slots per packet average (W - 1)/2 with variance (W^2 - 1)/12
  const double n = static_cast<double>(r.audit.successes);
  const double mean = static_cast<double>(r.audit.idle_slots) / n;
  const double sigma = std::sqrt((64.0 - 1.0) / 12.0 / n);
  CHECK(std::abs(mean - 3.5) <= 3.0 * sigma + 7.0 / n);
  check_conservation(r.audit);
  check_elapsed(r.audit, Mechanism::basic);
}

TEST_CASE("device field") {
  const double density = 5e-5, radius = 1000.0, strip = 10000.0;
  const double mean = density * strip * 2.0 * radius;
  const int seeds = 200;
  double sum = 0.0, sum2 = 0.0;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(mix_seed(99, s));
    const auto devs = generate_devices(density, radius, strip, rng);
    const double n = static_cast<double>(devs.size());
    sum += n;
    sum2 += n * n;
    for (const auto& d : devs) {
      REQUIRE(std::abs(d.y) <= radius);
      REQUIRE(d.x >= 0.0);
      REQUIRE(d.x <= strip);
    }
  }
  const double m = sum / seeds;
  const double var = (sum2 - seeds * m * m) / (seeds - 1);
  CHECK(std::abs(m - mean) <= 3.0 * std::sqrt(mean / seeds));
  // sample variance of a Poisson count; sd of s^2 is about mean*sqrt(2/(k-1))
  CHECK(std::abs(var - mean) <= 4.0 * mean * std::sqrt(2.0 / (seeds - 1)));

  Rng rng(1);
  CHECK(generate_devices(0.0, radius, strip, rng).empty());
  CHECK_THROWS_AS((void)generate_devices(-1.0, radius, strip, rng), Error);
}

TEST_CASE("protocol assignment") {
  ScenarioConfig s;
  s.variant = Variant::modified;
  s.cw_min_max = 16;
  s.retry_limit_max = 8;
  const auto p = partition(1000.0, 10.0, 45.0);
  REQUIRE(p.size() == 4);
  const auto a = modified_allocation(p, 16, 8);

  Device center;
  center.y = 0.0;
  assign_protocol(center, s, &p, &a);
  CHECK(center.cluster == 4);
  CHECK(center.cw_min == 1);
  CHECK(center.retry_limit == 8);

  Device rim;
  rim.y = 999.99;
  assign_protocol(rim, s, &p, &a);
  CHECK(rim.cluster == 0);
  CHECK(rim.cw_min == a.cw_min.front());
  CHECK(rim.retry_limit == a.retry_limit.front());

  s.variant = Variant::conventional;
  Device conv;
  assign_protocol(conv, s, &p, &a);
  CHECK(conv.cluster == 4);
  CHECK(conv.cw_min == s.cw_min);
  CHECK(conv.retry_limit == s.retry_limit);
}

TEST_CASE("run audits") {
  for (auto mech : {Mechanism::basic, Mechanism::rts_cts}) {
    for (auto var : {Variant::conventional, Variant::modified}) {
      auto c = small_config(mech, var);
      c.check_invariants = true;
      const auto r = run(c);
      CHECK(r.throughput > 0.0);
      CHECK(r.throughput < 1.0);
      REQUIRE(r.ci95.has_value());
      std::int64_t per_cluster = 0;
      for (auto v : r.cluster_successes) per_cluster += v;
      CHECK(per_cluster == r.successes);
      for (const auto& rep : r.replications) {
        check_conservation(rep.audit);
        check_elapsed(rep.audit, mech);
        CHECK(rep.measured_us > 0);
        CHECK(rep.throughput == doctest::Approx(rep.successes * 65536.0 /
                                                static_cast<double>(rep.measured_us)));
      }
    }
  }
}

TEST_CASE("determinism") {
  auto c = small_config(Mechanism::basic, Variant::modified);
  c.workers = 1;
  const auto a = run(c);
  c.workers = 3;
  const auto b = run(c);
  REQUIRE(a.replications.size() == b.replications.size());
  CHECK(a.throughput == b.throughput);
  for (std::size_t i = 0; i < a.replications.size(); ++i) {
    CHECK(a.replications[i].seed == b.replications[i].seed);
    CHECK(a.replications[i].successes == b.replications[i].successes);
    CHECK(a.replications[i].audit.elapsed_us == b.replications[i].audit.elapsed_us);
  }
  c.seed = 12;
  CHECK(run(c).throughput != a.throughput);
}

TEST_CASE("run validation") {
  auto c = small_config(Mechanism::basic, Variant::conventional);
  c.warmup_s = 1.0;
  try {
    (void)run(c);
    FAIL("expected bad-warmup");
  } catch (const Error& e) {
    CHECK(e.code() == "bad-warmup");
  }
  c.warmup_s.reset();
  c.sim_duration_s = 10.0;
  CHECK_THROWS_AS((void)run(c), Error);
  c.sim_duration_s = 0.0;
  c.replications = 0;
  CHECK_THROWS_AS((void)run(c), Error);
}

TEST_CASE("confidence interval") {
  CHECK_FALSE(ci95_half_width({0.5}).has_value());
  // sd 1, n 3, t(0.975, 2) = 4.302652730
  CHECK(*ci95_half_width({1.0, 2.0, 3.0}) == doctest::Approx(4.302652730 / std::sqrt(3.0)));
  CHECK(*ci95_half_width({0.2, 0.2, 0.2, 0.2}) == 0.0);
}
