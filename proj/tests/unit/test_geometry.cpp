#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../oracles/geometry_mc.hpp"
#include "uavmac/core.hpp"
#include "uavmac/geometry.hpp"

using namespace uavmac;
using std::numbers::pi;

TEST_CASE("communication duration") {
  CHECK(communication_duration(0.0, 1000.0, 10.0) == doctest::Approx(200.0));
  CHECK(communication_duration(1000.0 * std::sin(pi / 3), 1000.0, 10.0) ==
        doctest::Approx(100.0));
  CHECK(communication_duration(1000.0, 1000.0, 10.0) == 0.0);
  CHECK(communication_duration(-300.0, 1000.0, 10.0) == communication_duration(300.0, 1000.0, 10.0));
  double prev = 1e300;
  for (double y = 0.0; y <= 1000.0; y += 50.0) {
    const double d = communication_duration(y, 1000.0, 10.0);
    CHECK(d < prev);
    prev = d;
  }
  try {
    (void)communication_duration(1000.5, 1000.0, 10.0);
    FAIL("expected outside-coverage");
  } catch (const Error& e) {
    CHECK(e.code() == "outside-coverage");
  }
}

TEST_CASE("traversal count") {
  CHECK(traversal_count(200.0, 0.9) == 222);
  CHECK(traversal_count(0.5, 0.9) == 0);
  CHECK(traversal_count(0.9, 0.9) == 1);
  // 0.3 / 0.1 is 2.9999999999999996 in binary
  CHECK(traversal_count(0.3, 0.1) == 3);
}

TEST_CASE("single-cluster partition") {
  const auto p = partition(1000.0, 10.0, 120.0);
  REQUIRE(p.size() == 1);
  const auto& c = p.clusters.front();
  CHECK(c.index == 1);
  CHECK(c.traversal_count == 1);
  CHECK(c.duration_s == doctest::Approx(120.0));
  CHECK(c.y_outer == doctest::Approx(800.0));
  CHECK(c.y_inner == 0.0);
  const double expected = 2.0 * (800.0 * 600.0 + 1e6 * std::asin(0.8));
  CHECK(c.area_m2 == doctest::Approx(expected).epsilon(1e-12));
  CHECK(c.area_m2 == doctest::Approx(2814600.0).epsilon(1e-5));
  CHECK(p.excluded_edge_area_m2 == doctest::Approx(327000.0).epsilon(1e-4));

  SUBCASE("Monte Carlo area") {
    const std::int64_t n = 1'000'000;
    const auto counts = oracle::traversal_histogram(1000.0, 10.0, 120.0, 1, n, 7);
    const double share = c.area_m2 / (pi * 1e6);
    const double sigma = std::sqrt(share * (1.0 - share) / n);
    CHECK(std::abs(counts[1] / double(n) - share) < 3.0 * sigma);
  }
}

TEST_CASE("no cluster when the disk is crossed within one traversal") {
  try {
    (void)partition(1000.0, 10.0, 200.0 + 1e-6);
    FAIL("expected no-cluster");
  } catch (const Error& e) {
    CHECK(e.code() == "no-cluster");
  }
  // an exact fit is still one cluster
  CHECK(partition(1000.0, 10.0, 200.0).size() == 1);
}

TEST_CASE("area conservation and ordering") {
  for (double vd : {1200.0, 700.0, 333.0, 95.0, 2.0}) {
    const auto p = partition(1000.0, 1.0, vd);
    double total = p.excluded_edge_area_m2;
    for (int i = 0; i < p.size(); ++i) {
      total += p.clusters[i].area_m2;
      CHECK(p.clusters[i].traversal_count == i + 1);
      // an exact fit leaves the innermost band empty at y = 0
      if (i + 1 == p.size() && std::fmod(2000.0, vd) == 0.0)
        CHECK(p.clusters[i].y_outer == 0.0);
      else
        CHECK(p.clusters[i].y_inner < p.clusters[i].y_outer);
      if (i > 0) CHECK(p.clusters[i].y_outer == p.clusters[i - 1].y_inner);
    }
    CHECK(total == doctest::Approx(pi * 1e6).epsilon(1e-6));
    CHECK(p.size() == static_cast<int>(std::floor(2000.0 / vd)));
  }
}

TEST_CASE("fine partition fills the disk") {
  const double R = 1000.0;
  const auto p = partition(R, 1.0, 2.0 * R / 1e6);
  CHECK(p.size() == 1000000);
  CHECK(p.areas().sum() == doctest::Approx(pi * R * R).epsilon(1e-4));
  CHECK(p.excluded_edge_area_m2 / (pi * R * R) < 1e-4);
}

TEST_CASE("area-weighted traversal count matches quadrature") {
  const double R = 1000.0, v = 10.0, delta = 37.0;
  const auto p = partition(R, v, delta);
  const double mean = p.areas().dot(p.traversal_counts()) / (pi * R * R);
  const double quad = oracle::mean_traversals_quadrature(R, v, delta, 4'000'000);
  CHECK(mean == doctest::Approx(quad).epsilon(1e-4));
}

TEST_CASE("cluster lookup") {
  const auto p = partition(1000.0, 10.0, 45.0);  // N = 4
  REQUIRE(p.size() == 4);
  CHECK(p.cluster_of(0.0) == 4);
  CHECK(p.cluster_of(999.0) == 0);
  for (const auto& c : p.clusters) {
    const double mid = 0.5 * (c.y_inner + c.y_outer);
    CHECK(p.cluster_of(mid) == c.index);
    CHECK(p.cluster_of(-mid) == c.index);
    CHECK(traversal_count(communication_duration(mid, 1000.0, 10.0), 45.0) == c.index);
  }
}

TEST_CASE("Poisson population law") {
  CHECK(poisson_pmf(2.0, 0) == doctest::Approx(std::exp(-2.0)));
  CHECK(poisson_pmf(2.0, 0) == doctest::Approx(0.135335).epsilon(1e-6));
  CHECK(population_pmf(0.0, 1e6, 0) == 1.0);
  CHECK(population_pmf(0.0, 1e6, 3) == 0.0);
  CHECK(population_pmf(5e-5, 4e4, 2) == doctest::Approx(2.0 * std::exp(-2.0)));
  // large n stays finite in log space
  CHECK(std::isfinite(poisson_pmf(1000.0, 1000)));
  CHECK(poisson_pmf(1000.0, 1000) > 0.0);

  const double mean = 140.73;
  const auto k = poisson_truncation(mean, 1e-12);
  CHECK(k >= mean);
  long double f = std::exp(-static_cast<long double>(mean)), cum = f;
  for (std::int64_t n = 1; n <= k; ++n) {
    f *= mean / n;
    cum += f;
  }
  CHECK(static_cast<double>(1.0L - cum) <= 1e-12);
  // and K is the smallest such count, up to rounding of the running sum
  CHECK(static_cast<double>(1.0L - (cum - f)) > 1e-13);
}
