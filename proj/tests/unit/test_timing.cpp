#include <doctest.h>

#include <vector>

#include "uavmac/timing.hpp"

using namespace uavmac;

TEST_CASE("slot durations at the default parameter set") {
  const MacTiming t;
  CHECK(success_duration(Mechanism::basic, t) == 66304.0);
  CHECK(success_duration(Mechanism::rts_cts, t) == 66532.0);
  CHECK(collision_duration(Mechanism::basic, t) == 66114.0);
  CHECK(collision_duration(Mechanism::rts_cts, t) == 428.0);
  CHECK(timeout_duration(Mechanism::basic, t) == 328.0);
  CHECK(timeout_duration(Mechanism::rts_cts, t) == 328.0);
  CHECK(collision_duration(Mechanism::rts_cts, t) < collision_duration(Mechanism::basic, t));
}

TEST_CASE("zero payload and zero timeouts") {
  MacTiming t;
  t.payload_bits = 0;
  CHECK(success_duration(Mechanism::basic, t) == 768.0);
  CHECK(collision_duration(Mechanism::basic, t) == 578.0);
  t.sifs_us = 0.0;
  t.ack_timeout_us = 0.0;
  t.cts_timeout_us = 0.0;
  CHECK(timeout_duration(Mechanism::basic, t) == 0.0);
  CHECK(timeout_duration(Mechanism::rts_cts, t) == 0.0);
}

TEST_CASE("durations are linear in each constant") {
  const MacTiming base;
  const double x = 17.0;
  struct Probe {
    double MacTiming::*field;
    double basic_s, basic_c, basic_o, rts_s, rts_c, rts_o;
  };
  const std::vector<Probe> probes = {
      {&MacTiming::idle_slot_us, 2, 1, 0, 0, 0, 0},   {&MacTiming::sifs_us, 1, 0, 1, 3, 1, 1},
      {&MacTiming::difs_us, 1, 1, 0, 1, 1, 0},        {&MacTiming::header_us, 1, 1, 0, 1, 0, 0},
      {&MacTiming::ack_us, 1, 0, 0, 1, 1, 0},         {&MacTiming::rts_us, 0, 0, 0, 1, 1, 0},
      {&MacTiming::cts_us, 0, 0, 0, 1, 0, 0},         {&MacTiming::ack_timeout_us, 0, 0, 1, 0, 0, 0},
      {&MacTiming::cts_timeout_us, 0, 0, 0, 0, 0, 1},
  };
  for (const auto& p : probes) {
    MacTiming t = base;
    t.*(p.field) += x;
    CHECK(success_duration(Mechanism::basic, t) - success_duration(Mechanism::basic, base) ==
          doctest::Approx(p.basic_s * x));
    CHECK(collision_duration(Mechanism::basic, t) - collision_duration(Mechanism::basic, base) ==
          doctest::Approx(p.basic_c * x));
    CHECK(timeout_duration(Mechanism::basic, t) - timeout_duration(Mechanism::basic, base) ==
          doctest::Approx(p.basic_o * x));
    CHECK(success_duration(Mechanism::rts_cts, t) - success_duration(Mechanism::rts_cts, base) ==
          doctest::Approx(p.rts_s * x));
    CHECK(collision_duration(Mechanism::rts_cts, t) -
              collision_duration(Mechanism::rts_cts, base) ==
          doctest::Approx(p.rts_c * x));
    CHECK(timeout_duration(Mechanism::rts_cts, t) - timeout_duration(Mechanism::rts_cts, base) ==
          doctest::Approx(p.rts_o * x));
  }
  // payload enters success and collision for basic, success only for RTS/CTS
  MacTiming t = base;
  t.payload_bits += 1000;
  CHECK(success_duration(Mechanism::basic, t) - success_duration(Mechanism::basic, base) == 1000.0);
  CHECK(collision_duration(Mechanism::basic, t) - collision_duration(Mechanism::basic, base) ==
        1000.0);
  CHECK(collision_duration(Mechanism::rts_cts, t) == collision_duration(Mechanism::rts_cts, base));
}

TEST_CASE("backoff and freeze expectations") {
  CHECK(expected_backoff_total(8, 2) == 26.5);
  CHECK(expected_backoff_total(8, 0) == 3.5);
  CHECK(expected_backoff_total(16, 1) == 23.0);
  CHECK(expected_freeze(26.5, 0.0) == 0.0);
  CHECK(expected_freeze(26.5, 0.5) == 26.5);
  try {
    (void)expected_freeze(26.5, 1.0);
    FAIL("expected divergent-freeze");
  } catch (const Error& e) {
    CHECK(e.code() == "divergent-freeze");
  }
}

TEST_CASE("traversal time") {
  const MacTiming t;
  const auto basic = slot_durations(Mechanism::basic, t);

  TraversalInputs in;
  in.busy_prob = 0.0;
  in.success_prob = 0.4;
  in.any_tx_prob = 0.5;
  in.cw_min = 8;
  in.retry_limit = 2;
  CHECK(traversal_time(in, basic, t.idle_slot_us) == 134209.0);

  in.retry_limit = 0;
  CHECK(traversal_time(in, basic, t.idle_slot_us) == 175.0);

  SUBCASE("term-by-term recomputation") {
    // Spreadsheet-style: list the windows, sum each piece separately.
    const long double q = 0.3L, pb = 0.5L, ps = 0.8L * pb;
    const long double windows[] = {8, 16, 32, 64, 128, 256, 512, 1024};
    long double eb = 0.0L;
    for (long double w : windows) eb += (w - 1.0L) / 2.0L;
    const long double ef = eb * q / (1.0L - q);
    const long double busy_mix = (ps / pb) * 66304.0L + ((pb - ps) / pb) * 66114.0L;
    const long double expected = eb * 50.0L + ef * busy_mix + 7.0L * (66114.0L + 328.0L);

    TraversalInputs d;
    d.busy_prob = 0.3;
    d.any_tx_prob = 0.5;
    d.success_prob = 0.8 * 0.5;
    d.cw_min = 8;
    d.retry_limit = 7;
    const double got = traversal_time(d, basic, t.idle_slot_us);
    CHECK(got == doctest::Approx(static_cast<double>(expected)).epsilon(1e-13));
    CHECK(got == doctest::Approx(29370003.714285714).epsilon(1e-13));
  }

  SUBCASE("strictly increasing in q") {
    TraversalInputs d;
    d.any_tx_prob = 0.6;
    d.success_prob = 0.3;
    double prev = -1.0;
    for (double q = 0.0; q < 0.999; q += 0.05) {
      d.busy_prob = q;
      const double v = traversal_time(d, basic, t.idle_slot_us);
      CHECK(v > prev);
      prev = v;
    }
  }

  SUBCASE("degenerate mixture") {
    TraversalInputs d;
    d.any_tx_prob = 0.0;
    d.success_prob = 0.0;
    d.busy_prob = 0.0;
    CHECK_NOTHROW((void)traversal_time(d, basic, t.idle_slot_us));
    d.busy_prob = 0.1;
    try {
      (void)traversal_time(d, basic, t.idle_slot_us);
      FAIL("expected undefined-mixture");
    } catch (const Error& e) {
      CHECK(e.code() == "undefined-mixture");
    }
    d.any_tx_prob = 0.2;
    d.success_prob = 0.3;
    CHECK_THROWS_AS((void)traversal_time(d, basic, t.idle_slot_us), Error);
  }
}
