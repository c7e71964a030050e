#include "uavmac/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "uavmac/core.hpp"

namespace uavmac {

namespace {

// Relative slack on floor() so exact multiples are not lost to rounding.
constexpr double kFloorSlack = 1e-12;

}  // namespace

double communication_duration(double y, double radius, double speed) {
  const double offset = std::abs(y);
  if (offset > radius) {
    throw Error("outside-coverage", "offset " + std::to_string(y) + " m lies outside radius " +
                                        std::to_string(radius) + " m");
  }
  if (!(speed > 0.0)) throw Error("nonpositive-speed", "speed must be > 0");
  return 2.0 * std::sqrt((radius - offset) * (radius + offset)) / speed;
}

std::int64_t traversal_count(double duration, double delta) {
  if (!(delta > 0.0)) throw Error("nonpositive-delta", "traversal time must be > 0");
  if (duration < 0.0) throw Error("negative-duration", "duration must be >= 0");
  return static_cast<std::int64_t>(std::floor(duration / delta * (1.0 + kFloorSlack)));
}

Eigen::VectorXd ClusterPartition::areas() const {
  Eigen::VectorXd a(size());
  for (int i = 0; i < size(); ++i) a[i] = clusters[i].area_m2;
  return a;
}

Eigen::VectorXd ClusterPartition::traversal_counts() const {
  Eigen::VectorXd m(size());
  for (int i = 0; i < size(); ++i) m[i] = static_cast<double>(clusters[i].traversal_count);
  return m;
}

int ClusterPartition::cluster_of(double y) const {
  const double offset = std::abs(y);
  if (clusters.empty() || offset > radius_m) return 0;
  // y_outer shrinks as the index grows; find the innermost band still holding |y|.
  if (offset > clusters.front().y_outer) return 0;
  auto it = std::partition_point(clusters.begin(), clusters.end(),
                                 [offset](const Cluster& c) { return c.y_outer >= offset; });
  return std::prev(it)->index;
}

double half_strip_area(double y, double radius) {
  const double clamped = std::clamp(y, 0.0, radius);
  return clamped * std::sqrt((radius - clamped) * (radius + clamped)) +
         radius * radius * std::asin(clamped / radius);
}

double band_boundary(int k, double radius, double speed, double delta) {
  const double half_chord = k * speed * delta / 2.0;
  if (half_chord >= radius * (1.0 - kFloorSlack)) return 0.0;
  return std::sqrt((radius - half_chord) * (radius + half_chord));
}

ClusterPartition partition(double radius, double speed, double delta) {
  if (!(radius > 0.0)) throw Error("nonpositive-radius", "radius must be > 0");
  if (!(speed > 0.0)) throw Error("nonpositive-speed", "speed must be > 0");
  if (!(delta > 0.0)) throw Error("nonpositive-delta", "traversal time must be > 0");

  const double ratio = 2.0 * radius / (speed * delta);
  if (ratio * (1.0 + kFloorSlack) < 1.0) {
    throw Error("no-cluster", "no device can complete a traversal: 2R/(v*delta) = " +
                                  std::to_string(ratio) + " < 1");
  }
  if (ratio > 1e7) throw Error("too-many-clusters", "2R/(v*delta) exceeds 1e7 clusters");
  const int n = static_cast<int>(std::floor(ratio * (1.0 + kFloorSlack)));

  ClusterPartition out;
  out.radius_m = radius;
  out.speed_mps = speed;
  out.delta_s = delta;
  out.clusters.reserve(static_cast<std::size_t>(n));

  double outer = band_boundary(1, radius, speed, delta);
  double outer_area = half_strip_area(outer, radius);
  out.excluded_edge_area_m2 = 2.0 * (half_strip_area(radius, radius) - outer_area);
  for (int i = 1; i <= n; ++i) {
    const double inner = (i == n) ? 0.0 : band_boundary(i + 1, radius, speed, delta);
    const double inner_area = half_strip_area(inner, radius);
    Cluster c;
    c.index = i;
    c.traversal_count = i;
    c.duration_s = i * delta;
    c.y_inner = inner;
    c.y_outer = outer;
    c.area_m2 = 2.0 * (outer_area - inner_area);
    out.clusters.push_back(c);
    outer = inner;
    outer_area = inner_area;
  }
  return out;
}

double poisson_pmf(double mean, std::int64_t n) {
  if (n < 0) return 0.0;
  if (mean <= 0.0) return n == 0 ? 1.0 : 0.0;
  const double k = static_cast<double>(n);
  return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

double population_pmf(double density, double area, std::int64_t n) {
  if (density < 0.0 || area < 0.0) throw Error("bad-argument", "density and area must be >= 0");
  return poisson_pmf(density * area, n);
}

std::int64_t poisson_truncation(double mean, double tail_eps) {
  if (mean <= 0.0) return 0;
  double cumulative = 0.0;
  std::int64_t k = 0;
  for (;; ++k) {
    cumulative += poisson_pmf(mean, k);
    if (static_cast<double>(k) >= mean && 1.0 - cumulative < tail_eps) return k;
    // Rounding in the running sum can leave 1 - cumulative a few ulps above
    // tiny targets; the pmf itself dropping below the target ends the scan.
    if (static_cast<double>(k) > mean && poisson_pmf(mean, k) < tail_eps * 1e-3) return k;
  }
}

}  // namespace uavmac
