#ifndef UAVMAC_TESTS_ORACLES_SERIES_HPP
#define UAVMAC_TESTS_ORACLES_SERIES_HPP

// Brute-force Poisson sums, truncated once the remaining mass is negligible.
// The pmf comes from the f(n) = f(n-1) lambda / n recurrence, not lgamma.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// sum_n f(n) term(n) with f Poisson(lambda), until n > lambda and the
/// remaining Poisson tail is below `tail`.
inline double poisson_series(double lambda, const std::function<double(long)>& term,
                             double tail = 1e-16) {
  long double f = std::exp(-static_cast<long double>(lambda));
  long double cumulative = 0.0L, sum = 0.0L;
  for (long n = 0;; ++n) {
    if (n > 0) f *= static_cast<long double>(lambda) / n;
    cumulative += f;
    sum += f * term(n);
    if (n > lambda && 1.0L - cumulative < tail) break;
    if (n > 100000) break;
  }
  return static_cast<double>(sum);
}

inline double idle_series(double lambda, double tau) {
  return poisson_series(lambda, [tau](long n) { return std::pow(1.0 - tau, double(n)); });
}

inline double own_series(double lambda, double tau) {
  return poisson_series(lambda,
                        [tau](long n) { return n == 0 ? 0.0 : std::pow(1.0 - tau, double(n - 1)); });
}

inline double success_series(double lambda, double tau) {
  return poisson_series(lambda, [tau](long n) {
    return n == 0 ? 0.0 : double(n) * tau * std::pow(1.0 - tau, double(n - 1));
  });
}

/// Multi-cluster busy probability by explicit products of per-cluster sums.
inline std::vector<double> busy_series(const std::vector<double>& lambda,
                                       const std::vector<double>& tau, bool normalized = false) {
  std::vector<double> q(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    double others = 1.0;
    for (std::size_t h = 0; h < lambda.size(); ++h) {
      if (h != i) others *= idle_series(lambda[h], tau[h]);
    }
    double own = own_series(lambda[i], tau[i]);
    if (normalized) own /= 1.0 - std::exp(-lambda[i]);
    q[i] = 1.0 - others * own;
  }
  return q;
}

inline double any_tx_series(const std::vector<double>& lambda, const std::vector<double>& tau) {
  double idle = 1.0;
  for (std::size_t h = 0; h < lambda.size(); ++h) idle *= idle_series(lambda[h], tau[h]);
  return 1.0 - idle;
}

inline std::vector<double> success_series_all(const std::vector<double>& lambda,
                                              const std::vector<double>& tau) {
  std::vector<double> out(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    double others = 1.0;
    for (std::size_t h = 0; h < lambda.size(); ++h) {
      if (h != i) others *= idle_series(lambda[h], tau[h]);
    }
    out[i] = success_series(lambda[i], tau[i]) * others;
  }
  return out;
}

}  // namespace oracle

#endif  // UAVMAC_TESTS_ORACLES_SERIES_HPP
