#ifndef UAVMAC_CHAIN_HPP
#define UAVMAC_CHAIN_HPP

// Backoff chain of one cluster: states (j, k) with stage j in [0, J] and
// counter k in [0, 2^j W_0 - 1]. Header-only so the oracles can instantiate
// it with long double.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "uavmac/core.hpp"

namespace uavmac {

/// Flattened (j, k) indexing, stage-major.
class ChainLayout {
 public:
  ChainLayout(std::int64_t cw_min, int retry_limit) : cw_min_(cw_min), retry_limit_(retry_limit) {
    if (cw_min < 1) throw Error("zero-window", "cw_min must be >= 1");
    if (retry_limit < 0 || retry_limit > kMaxRetryLimit)
      throw Error("bad-retry-limit", "retry limit out of range");
    offsets_.reserve(static_cast<std::size_t>(retry_limit) + 2);
    std::int64_t at = 0;
    for (int j = 0; j <= retry_limit; ++j) {
      offsets_.push_back(at);
      at += window(j);
    }
    offsets_.push_back(at);
  }

  [[nodiscard]] std::int64_t cw_min() const { return cw_min_; }
  [[nodiscard]] int retry_limit() const { return retry_limit_; }
  [[nodiscard]] std::int64_t window(int j) const { return cw_min_ << j; }
  [[nodiscard]] Eigen::Index index(int j, std::int64_t k) const {
    return static_cast<Eigen::Index>(offsets_[static_cast<std::size_t>(j)] + k);
  }
  [[nodiscard]] Eigen::Index size() const { return static_cast<Eigen::Index>(offsets_.back()); }

 private:
  std::int64_t cw_min_;
  int retry_limit_;
  std::vector<std::int64_t> offsets_;
};

/// P_eq = (1 - Q) q + Q: the counter fails to move because the channel is
/// busy or the device has quit.
template <typename Scalar>
[[nodiscard]] Scalar effective_stall(Scalar busy, Scalar quit) {
  return (Scalar(1) - quit) * busy + quit;
}

namespace detail {

// (1 - p^{J+1}) and sum_j p^j (W_j - 1) / 2, the two pieces of the
// normalisation shared by b00 and tau.
template <typename Scalar>
void chain_sums(std::int64_t cw_min, int retry_limit, Scalar p, Scalar& visits, Scalar& counters) {
  Scalar pj(1);
  counters = Scalar(0);
  for (int j = 0; j <= retry_limit; ++j) {
    counters += pj * (std::ldexp(Scalar(cw_min), j) - Scalar(1)) / Scalar(2);
    pj *= p;
  }
  visits = Scalar(1) - pj;
}

}  // namespace detail

/// b_{0,0}, the stationary probability of the stage-0 transmit state.
/// Throws "absorbed-chain" at P_eq >= 1 unless the chain has a single state.
template <typename Scalar>
[[nodiscard]] Scalar base_state_probability(std::int64_t cw_min, int retry_limit, Scalar stall) {
  if (cw_min < 1) throw Error("zero-window", "cw_min must be >= 1");
  if (!(stall >= Scalar(0) && stall <= Scalar(1)))
    throw Error("bad-probability", "P_eq must lie in [0, 1]");
  if (cw_min == 1 && retry_limit == 0) return Scalar(1);
  if (stall >= Scalar(1))
    throw Error("absorbed-chain", "P_eq = 1: the backoff counter never moves");
  Scalar visits, counters;
  detail::chain_sums(cw_min, retry_limit, stall, visits, counters);
  return (Scalar(1) - stall) / (visits + counters);
}

template <typename Scalar>
[[nodiscard]] Scalar base_state_probability(std::int64_t cw_min, int retry_limit, Scalar busy,
                                            Scalar quit) {
  return base_state_probability(cw_min, retry_limit, effective_stall(busy, quit));
}

/// tau = b00 (1 - P_eq^{J+1}) / (1 - P_eq), summed directly so P_eq = 1 needs
/// no special case.
template <typename Scalar>
[[nodiscard]] Scalar tx_probability(Scalar base_state, Scalar stall, int retry_limit) {
  Scalar sum(0), pj(1);
  for (int j = 0; j <= retry_limit; ++j) {
    sum += pj;
    pj *= stall;
  }
  return base_state * sum;
}

/// tau as a function of P_eq alone, continuous on [0, 1] (tau -> 0 as the
/// chain absorbs). Used inside the fixed point where an iterate may touch 1.
template <typename Scalar>
[[nodiscard]] Scalar tx_probability_of_stall(std::int64_t cw_min, int retry_limit, Scalar stall) {
  if (cw_min == 1 && retry_limit == 0) return Scalar(1);
  Scalar visits, counters;
  detail::chain_sums(cw_min, retry_limit, stall, visits, counters);
  const Scalar den = visits + counters;
  return den > Scalar(0) ? visits / den : Scalar(0);
}

/// Q = (1 - p_final)^m.
template <typename Scalar>
[[nodiscard]] Scalar quitting_probability(Scalar p_final, std::int64_t traversals) {
  if (!(p_final >= Scalar(0) && p_final <= Scalar(1)))
    throw Error("bad-probability", "p_final must lie in [0, 1]");
  if (traversals < 1) throw Error("bad-traversal-count", "traversal count must be >= 1");
  return std::pow(Scalar(1) - p_final, Scalar(traversals));
}

/// Stationary vector over ChainLayout(cw_min, retry_limit):
/// b_{j,0} = P_eq^j b00 and b_{j,k} = (W_j - k)/W_j * b_{j,0} / (1 - P_eq).
template <typename Scalar>
[[nodiscard]] Eigen::Matrix<Scalar, Eigen::Dynamic, 1> stationary_distribution(
    std::int64_t cw_min, int retry_limit, Scalar busy, Scalar quit) {
  const ChainLayout layout(cw_min, retry_limit);
  const Scalar p = effective_stall(busy, quit);
  const Scalar b00 = base_state_probability(cw_min, retry_limit, p);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b(layout.size());
  Scalar head = b00;
  for (int j = 0; j <= retry_limit; ++j) {
    const std::int64_t w = layout.window(j);
    b[layout.index(j, 0)] = head;
    for (std::int64_t k = 1; k < w; ++k) {
      b[layout.index(j, k)] = Scalar(w - k) / Scalar(w) * head / (Scalar(1) - p);
    }
    head *= p;
  }
  return b;
}

/// One-step matrix of the chain, row-stochastic, rows = from-state.
///   (j,k>0) -> (j,k-1)        (1-Q)(1-q)
///   (j,k>0) -> (j,k)          P_eq
///   (j<J,0) -> (0,k)          (1-P_eq)/W_0
///   (j<J,0) -> (j+1,k)        P_eq/W_{j+1}
///   (J,0)   -> (0,k)          1/W_0
template <typename Scalar>
[[nodiscard]] Eigen::SparseMatrix<Scalar, Eigen::RowMajor> transition_matrix(std::int64_t cw_min,
                                                                            int retry_limit,
                                                                            Scalar busy,
                                                                            Scalar quit) {
  if (!(busy >= Scalar(0) && busy <= Scalar(1) && quit >= Scalar(0) && quit <= Scalar(1)))
    throw Error("bad-probability", "q and Q must lie in [0, 1]");
  const ChainLayout layout(cw_min, retry_limit);
  const Scalar p = effective_stall(busy, quit);
  const Scalar move = (Scalar(1) - quit) * (Scalar(1) - busy);
  const Scalar w0 = Scalar(cw_min);

  std::vector<Eigen::Triplet<Scalar>> entries;
  entries.reserve(static_cast<std::size_t>(2 * layout.size() + 2 * (retry_limit + 1) * cw_min));
  auto add = [&entries](Eigen::Index r, Eigen::Index c, Scalar v) {
    if (v != Scalar(0)) entries.emplace_back(r, c, v);
  };
  for (int j = 0; j <= retry_limit; ++j) {
    const std::int64_t w = layout.window(j);
    for (std::int64_t k = 1; k < w; ++k) {
      add(layout.index(j, k), layout.index(j, k - 1), move);
      add(layout.index(j, k), layout.index(j, k), p);
    }
    const Eigen::Index from = layout.index(j, 0);
    const Scalar reset = (j < retry_limit) ? (Scalar(1) - p) : Scalar(1);
    for (std::int64_t k = 0; k < cw_min; ++k) add(from, layout.index(0, k), reset / w0);
    if (j < retry_limit) {
      const std::int64_t next = layout.window(j + 1);
      for (std::int64_t k = 0; k < next; ++k) add(from, layout.index(j + 1, k), p / Scalar(next));
    }
  }
  Eigen::SparseMatrix<Scalar, Eigen::RowMajor> m(layout.size(), layout.size());
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

}  // namespace uavmac

#endif  // UAVMAC_CHAIN_HPP
