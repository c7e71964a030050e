#ifndef UAVMAC_GEOMETRY_HPP
#define UAVMAC_GEOMETRY_HPP

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace uavmac {

/// Seconds a ground point at lateral offset `y` from the flight line spends
/// inside a coverage disk of radius `radius` moving at `speed`.
/// Throws "outside-coverage" when |y| > radius.
[[nodiscard]] double communication_duration(double y, double radius, double speed);

/// floor(duration / delta), robust to a duration that is an exact multiple
/// of delta up to rounding.
[[nodiscard]] std::int64_t traversal_count(double duration, double delta);

/// One band-shaped cluster. Its devices sit at |y| in (y_inner, y_outer]
/// on both sides of the flight line and traverse the backoff chain exactly
/// `traversal_count` times while covered.
struct Cluster {
  int index = 0;  // 1-based
  std::int64_t traversal_count = 0;
  double duration_s = 0.0;  // index * delta
  double y_inner = 0.0;
  double y_outer = 0.0;
  double area_m2 = 0.0;
};

struct ClusterPartition {
  double radius_m = 0.0;
  double speed_mps = 0.0;
  double delta_s = 0.0;
  std::vector<Cluster> clusters;   // ordered by index, cluster N is centred on the track
  double excluded_edge_area_m2 = 0.0;  // rim where the traversal count is 0

  [[nodiscard]] int size() const { return static_cast<int>(clusters.size()); }
  [[nodiscard]] Eigen::VectorXd areas() const;
  [[nodiscard]] Eigen::VectorXd traversal_counts() const;

  /// Cluster index (1..N) for lateral offset y; 0 on the rim or outside.
  [[nodiscard]] int cluster_of(double y) const;
};

/// Area of the disk between the flight line and offset y on one side,
/// y sqrt(R^2 - y^2) + R^2 asin(y / R), for 0 <= y <= R.
[[nodiscard]] double half_strip_area(double y, double radius);

/// Band boundary where the traversal count reaches k.
[[nodiscard]] double band_boundary(int k, double radius, double speed, double delta);

/// Splits the disk into N = floor(2R / (v delta)) bands. Throws "no-cluster"
/// when N = 0.
[[nodiscard]] ClusterPartition partition(double radius, double speed, double delta);

/// Poisson probability of n devices when the mean is `mean`, evaluated in
/// log space.
[[nodiscard]] double poisson_pmf(double mean, std::int64_t n);

/// f_i(n) for a band of area `area` at density `density`.
[[nodiscard]] double population_pmf(double density, double area, std::int64_t n);

/// Smallest K such that the Poisson(mean) mass on [0, K] is at least
/// 1 - tail_eps and K >= mean.
[[nodiscard]] std::int64_t poisson_truncation(double mean, double tail_eps);

}  // namespace uavmac

#endif  // UAVMAC_GEOMETRY_HPP
