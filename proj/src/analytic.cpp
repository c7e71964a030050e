#include "uavmac/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace uavmac {

std::string_view to_string(BusyModel m) {
  return m == BusyModel::verbatim ? "verbatim" : "normalized";
}

std::string_view to_string(QuitModel m) {
  switch (m) {
    case QuitModel::derived: return "derived";
    case QuitModel::stationary: return "stationary";
    case QuitModel::disabled: return "disabled";
  }
  return "derived";
}

std::string_view to_string(DeltaMode m) {
  switch (m) {
    case DeltaMode::contention_free: return "contention_free";
    case DeltaMode::static_bootstrap: return "static";
    case DeltaMode::relaxed: return "relaxed";
  }
  return "contention_free";
}

BusyModel parse_busy_model(std::string_view text) {
  if (text == "verbatim") return BusyModel::verbatim;
  if (text == "normalized") return BusyModel::normalized;
  throw Error("bad-busy-model", "unknown busy model '" + std::string(text) +
                                    "' (verbatim|normalized)");
}

QuitModel parse_quit_model(std::string_view text) {
  if (text == "derived") return QuitModel::derived;
  if (text == "stationary") return QuitModel::stationary;
  if (text == "disabled" || text == "off") return QuitModel::disabled;
  throw Error("bad-quit-model", "unknown quit model '" + std::string(text) +
                                    "' (derived|stationary|disabled)");
}

DeltaMode parse_delta_mode(std::string_view text) {
  if (text == "contention_free" || text == "free") return DeltaMode::contention_free;
  if (text == "static") return DeltaMode::static_bootstrap;
  if (text == "relaxed") return DeltaMode::relaxed;
  throw Error("bad-delta-mode", "unknown delta mode '" + std::string(text) +
                                    "' (contention_free|static|relaxed)");
}

// ---------------------------------------------------------------------------
// Population law

PopulationLaw PopulationLaw::poisson(Eigen::VectorXd means) {
  if ((means.array() < 0.0).any() || !means.allFinite())
    throw Error("bad-argument", "Poisson means must be finite and >= 0");
  PopulationLaw law;
  law.means_ = std::move(means);
  return law;
}

PopulationLaw PopulationLaw::poisson(const ClusterPartition& partition, double density) {
  if (!(density >= 0.0)) throw Error("negative-density", "density must be >= 0");
  return poisson(partition.areas() * density);
}

PopulationLaw PopulationLaw::fixed(Eigen::VectorXi counts) {
  if ((counts.array() < 0).any()) throw Error("bad-argument", "device counts must be >= 0");
  PopulationLaw law;
  law.fixed_ = true;
  law.means_ = counts.cast<double>();
  return law;
}

double PopulationLaw::idle_factor(int i, double tau) const {
  const double n = means_[i];
  if (fixed_) return std::pow(1.0 - tau, n);
  return std::exp(-n * tau);
}

double PopulationLaw::own_factor(int i, double tau, BusyModel model) const {
  const double n = means_[i];
  // An empty cluster has no tagged device; use the n >= 1 conditional limit.
  if (n == 0.0) return 1.0;
  if (fixed_) return std::pow(1.0 - tau, n - 1.0);
  double o;
  if (tau >= 1.0) {
    o = n * std::exp(-n);
  } else {
    // e^{-l}(e^{l(1-t)} - 1)/(1-t), rearranged so large l cannot overflow.
    o = std::exp(-n * tau) * -std::expm1(-n * (1.0 - tau)) / (1.0 - tau);
  }
  if (model == BusyModel::normalized) o /= -std::expm1(-n);
  return o;
}

double PopulationLaw::success_factor(int i, double tau) const {
  const double n = means_[i];
  if (n == 0.0 || tau == 0.0) return 0.0;
  if (fixed_) return n * tau * std::pow(1.0 - tau, n - 1.0);
  return n * tau * std::exp(-n * tau);
}

namespace {

// Product of idle factors over all clusters, kept as a log plus a count of
// exact zeros so "all but one" products stay exact.
struct IdleProduct {
  double log_sum = 0.0;
  int zeros = 0;
  Eigen::VectorXd factors;

  IdleProduct(const PopulationLaw& law, const Eigen::VectorXd& tau) : factors(law.size()) {
    for (int h = 0; h < law.size(); ++h) {
      factors[h] = law.idle_factor(h, tau[h]);
      if (factors[h] == 0.0) {
        ++zeros;
      } else {
        log_sum += std::log(factors[h]);
      }
    }
  }

  [[nodiscard]] double all() const { return zeros > 0 ? 0.0 : std::exp(log_sum); }

  [[nodiscard]] double all_but(int i) const {
    if (factors[i] == 0.0) return zeros > 1 ? 0.0 : std::exp(log_sum);
    return zeros > 0 ? 0.0 : std::exp(log_sum - std::log(factors[i]));
  }

  // 1 - all(), accurate when the product is close to 1.
  [[nodiscard]] double complement() const { return zeros > 0 ? 1.0 : -std::expm1(log_sum); }
};

void check_tau(const PopulationLaw& law, const Eigen::VectorXd& tau) {
  if (tau.size() != law.size())
    throw Error("size-mismatch", "tau has " + std::to_string(tau.size()) + " entries for " +
                                     std::to_string(law.size()) + " clusters");
  if ((tau.array() < 0.0).any() || (tau.array() > 1.0).any() || !tau.allFinite())
    throw Error("bad-probability", "tau must lie in [0, 1]");
}

}  // namespace

Eigen::VectorXd busy_probabilities(const PopulationLaw& law, const Eigen::VectorXd& tau,
                                   BusyModel model) {
  check_tau(law, tau);
  const IdleProduct idle(law, tau);
  Eigen::VectorXd q(law.size());
  for (int i = 0; i < law.size(); ++i) {
    q[i] = std::clamp(1.0 - idle.all_but(i) * law.own_factor(i, tau[i], model), 0.0, 1.0);
  }
  return q;
}

double busy_probability(int i, const ClusterPartition& partition, double density,
                        const Eigen::VectorXd& tau, BusyModel model) {
  if (i < 0 || i >= partition.size()) throw Error("bad-index", "cluster index out of range");
  return busy_probabilities(PopulationLaw::poisson(partition, density), tau, model)[i];
}

double any_transmission_probability(const PopulationLaw& law, const Eigen::VectorXd& tau) {
  check_tau(law, tau);
  return IdleProduct(law, tau).complement();
}

double any_transmission_probability(const ClusterPartition& partition, double density,
                                    const Eigen::VectorXd& tau) {
  return any_transmission_probability(PopulationLaw::poisson(partition, density), tau);
}

SuccessProbabilities success_probabilities(const PopulationLaw& law, const Eigen::VectorXd& tau) {
  check_tau(law, tau);
  const IdleProduct idle(law, tau);
  SuccessProbabilities out;
  out.per_cluster.resize(law.size());
  for (int i = 0; i < law.size(); ++i) {
    out.per_cluster[i] = law.success_factor(i, tau[i]) * idle.all_but(i);
  }
  out.total = out.per_cluster.sum();
  return out;
}

SuccessProbabilities success_probabilities(const ClusterPartition& partition, double density,
                                           const Eigen::VectorXd& tau) {
  return success_probabilities(PopulationLaw::poisson(partition, density), tau);
}

double throughput(double p_tr, double p_s, const SlotDurations& slots, const MacTiming& timing) {
  if (!(p_tr >= 0.0 && p_tr <= 1.0)) throw Error("bad-probability", "P_tr must lie in [0, 1]");
  if (!(p_s >= 0.0)) throw Error("bad-probability", "P_s must be >= 0");
  if (p_s > p_tr * (1.0 + 1e-12) + 1e-15)
    throw Error("bad-probability", "P_s = " + std::to_string(p_s) + " exceeds P_tr = " +
                                       std::to_string(p_tr));
  const double collide = std::max(p_tr - p_s, 0.0);
  const double den = (1.0 - p_tr) * timing.idle_slot_us + p_s * slots.success_us +
                     collide * slots.collision_us;
  if (den <= 0.0) return 0.0;
  return p_s * timing.payload_us() / den;
}

// ---------------------------------------------------------------------------
// Allocation

Allocation modified_allocation(int n_clusters, std::int64_t cw_min_max, int retry_limit_max) {
  if (n_clusters < 1) throw Error("no-cluster", "modified allocation needs N >= 1");
  if (cw_min_max < 1) throw Error("zero-window", "cw_min_max must be >= 1");
  if (retry_limit_max < 0) throw Error("negative-retry-limit", "retry_limit_max must be >= 0");
  const std::int64_t n = n_clusters;
  Allocation a;
  a.cw_min.reserve(static_cast<std::size_t>(n));
  a.retry_limit.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 1; i <= n; ++i) {
    a.cw_min.push_back(std::max<std::int64_t>(1, ((n - i) * cw_min_max + n - 1) / n));
    a.retry_limit.push_back(static_cast<int>((retry_limit_max * i + n - 1) / n));
  }
  return a;
}

Allocation modified_allocation(const ClusterPartition& partition, std::int64_t cw_min_max,
                               int retry_limit_max) {
  return modified_allocation(partition.size(), cw_min_max, retry_limit_max);
}

Allocation allocation(const ScenarioConfig& scenario, int n_clusters) {
  if (scenario.variant == Variant::modified)
    return modified_allocation(n_clusters, scenario.cw_min_max, scenario.retry_limit_max);
  Allocation a;
  a.cw_min.assign(static_cast<std::size_t>(n_clusters), scenario.cw_min);
  a.retry_limit.assign(static_cast<std::size_t>(n_clusters), scenario.retry_limit);
  return a;
}

// ---------------------------------------------------------------------------
// Fixed point

namespace {

struct Problem {
  const PopulationLaw& law;
  const std::vector<std::int64_t>& m;
  const Allocation& alloc;
  const SolverOptions& opt;
};

double quit_of_stall(const Problem& pr, int i, double p) {
  const auto w = pr.alloc.cw_min[static_cast<std::size_t>(i)];
  const int j = pr.alloc.retry_limit[static_cast<std::size_t>(i)];
  const auto m = pr.m[static_cast<std::size_t>(i)];
  switch (pr.opt.quit_model) {
    case QuitModel::disabled: return 0.0;
    case QuitModel::derived: return std::pow(1.0 - std::pow(p, j), static_cast<double>(m));
    case QuitModel::stationary: {
      double final_state = 1.0;
      if (!(w == 1 && j == 0)) {
        double visits, counters;
        detail::chain_sums(w, j, p, visits, counters);
        final_state = std::pow(p, j) * (1.0 - p) / (visits + counters);
      }
      return std::pow(1.0 - final_state, static_cast<double>(m));
    }
  }
  return 0.0;
}

// Q solving its own equation for a given busy probability. The right side
// falls as Q grows, so the root is unique.
double inner_quit(const Problem& pr, int i, double busy) {
  if (pr.opt.quit_model == QuitModel::disabled) return 0.0;
  auto h = [&](double quit) {
    return quit_of_stall(pr, i, std::clamp(effective_stall(busy, quit), 0.0, 1.0)) - quit;
  };
  double lo = 0.0, hi = 1.0;
  if (h(lo) <= 0.0) return lo;
  if (h(hi) >= 0.0) return hi;
  for (int k = 0; k < 200 && hi - lo > 1e-17; ++k) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct MapValue {
  Eigen::VectorXd busy, stall, tau, quit;
};

// Q is eliminated exactly, so only tau is iterated. Substituting on Q as
// well oscillates once m_i is large.
MapValue apply_map(const Problem& pr, const Eigen::VectorXd& tau) {
  MapValue out;
  out.busy = busy_probabilities(pr.law, tau, pr.opt.busy_model);
  const int n = pr.law.size();
  out.stall.resize(n);
  out.tau.resize(n);
  out.quit.resize(n);
  for (int i = 0; i < n; ++i) {
    out.quit[i] = inner_quit(pr, i, out.busy[i]);
    const double p = std::clamp(effective_stall(out.busy[i], out.quit[i]), 0.0, 1.0);
    out.stall[i] = p;
    out.tau[i] = tx_probability_of_stall(pr.alloc.cw_min[static_cast<std::size_t>(i)],
                                         pr.alloc.retry_limit[static_cast<std::size_t>(i)], p);
  }
  return out;
}

double residual_of(const MapValue& f, const Eigen::VectorXd& tau) {
  if (tau.size() == 0) return 0.0;
  return (f.tau - tau).lpNorm<Eigen::Infinity>();
}

ClusterSolution finish(const Problem& pr, const Eigen::VectorXd& tau, const MapValue& f,
                       double residual, int iterations) {
  ClusterSolution s;
  s.tau = tau;
  s.quit = f.quit;
  s.busy = f.busy;
  s.stall = f.stall;
  s.base_state.resize(tau.size());
  for (int i = 0; i < tau.size(); ++i) {
    const auto w = pr.alloc.cw_min[static_cast<std::size_t>(i)];
    const int j = pr.alloc.retry_limit[static_cast<std::size_t>(i)];
    // Continuous extension b00 -> 0 at an absorbed chain.
    s.base_state[i] = (f.stall[i] >= 1.0 && !(w == 1 && j == 0))
                          ? 0.0
                          : base_state_probability(w, j, f.stall[i]);
  }
  s.cw_min = pr.alloc.cw_min;
  s.retry_limit = pr.alloc.retry_limit;
  s.traversal_counts = pr.m;
  s.iterations = iterations;
  s.residual = residual;
  return s;
}

ClusterSolution bisect_single(const Problem& pr, int iterations_so_far) {
  Eigen::VectorXd tau(1);
  auto g = [&](double t) {
    tau[0] = t;
    return apply_map(pr, tau).tau[0] - t;
  };
  double lo = 0.0, hi = 1.0;
  int steps = 0;
  if (g(hi) >= 0.0) {
    lo = hi;
  } else {
    for (; steps < 200 && hi - lo > 1e-17; ++steps) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) > 0.0 ? lo : hi) = mid;
    }
  }
  const double root = 0.5 * (lo + hi);
  tau[0] = root;
  const MapValue f = apply_map(pr, tau);
  const double res = residual_of(f, tau);
  if (!(res <= pr.opt.tolerances.fixed_point_eps)) {
    throw ConvergenceError("bisection fallback ended with residual " + std::to_string(res), res,
                           tau, f.quit);
  }
  ClusterSolution s = finish(pr, tau, f, res, iterations_so_far + steps);
  s.used_bisection = true;
  return s;
}

}  // namespace

ClusterSolution solve_fixed_point(const PopulationLaw& law,
                                  const std::vector<std::int64_t>& traversal_counts,
                                  const Allocation& alloc, const SolverOptions& options) {
  if (auto errors = validate(options.tolerances); !errors.empty())
    throw ValidationFailure(std::move(errors));
  const int n = law.size();
  if (n < 1) throw Error("no-cluster", "the fixed point needs at least one cluster");
  if (static_cast<int>(traversal_counts.size()) != n ||
      static_cast<int>(alloc.cw_min.size()) != n || static_cast<int>(alloc.retry_limit.size()) != n)
    throw Error("size-mismatch", "per-cluster inputs disagree on the number of clusters");
  for (int i = 0; i < n; ++i) {
    if (traversal_counts[static_cast<std::size_t>(i)] < 1)
      throw Error("bad-traversal-count", "every cluster needs m_i >= 1");
    if (alloc.cw_min[static_cast<std::size_t>(i)] < 1)
      throw Error("zero-window", "every cluster needs W_i >= 1");
    const int j = alloc.retry_limit[static_cast<std::size_t>(i)];
    if (j < 0 || j > kMaxRetryLimit) throw Error("bad-retry-limit", "retry limit out of range");
  }

  const Problem pr{law, traversal_counts, alloc, options};
  Eigen::VectorXd tau = options.initial_tau.value_or(Eigen::VectorXd::Zero(n));
  if (tau.size() != n) throw Error("size-mismatch", "initial iterate has the wrong size");

  const double eps = options.tolerances.fixed_point_eps;
  const double base_damp = options.tolerances.damping;
  double damp = base_damp;
  double best = std::numeric_limits<double>::infinity();
  int best_at = 0;
  double res = best, prev = best;
  MapValue f;
  for (int it = 1; it <= options.tolerances.max_iterations; ++it) {
    f = apply_map(pr, tau);
    res = residual_of(f, tau);
    if (res <= eps) return finish(pr, tau, f, res, it);
    if (res < best * (1.0 - 1e-6)) {
      best = res;
      best_at = it;
    } else if (n == 1 && it - best_at >= 500) {
      return bisect_single(pr, it);
    }
    // A growing residual means the step overshoots: shrink it, then let it
    // creep back once things settle.
    damp = res > prev ? std::max(0.5 * damp, 1e-4) : std::min(1.1 * damp, base_damp);
    prev = res;
    tau = (1.0 - damp) * tau + damp * f.tau;
  }
  if (n == 1) return bisect_single(pr, options.tolerances.max_iterations);
  throw ConvergenceError("fixed point did not converge in " +
                             std::to_string(options.tolerances.max_iterations) +
                             " iterations; residual " + std::to_string(res),
                         res, tau, f.quit);
}

ClusterSolution solve_fixed_point(const ClusterPartition& partition,
                                  const ScenarioConfig& scenario, const SolverOptions& options) {
  std::vector<std::int64_t> m;
  m.reserve(partition.clusters.size());
  for (const auto& c : partition.clusters) m.push_back(c.traversal_count);
  return solve_fixed_point(PopulationLaw::poisson(partition, scenario.density_per_m2), m,
                           allocation(scenario, partition.size()), options);
}

StationaryDistribution stationary_distribution(const ClusterSolution& solution, int i) {
  if (i < 0 || i >= solution.size()) throw Error("bad-index", "cluster index out of range");
  const auto w = solution.cw_min[static_cast<std::size_t>(i)];
  const int j = solution.retry_limit[static_cast<std::size_t>(i)];
  return {ChainLayout(w, j),
          stationary_distribution<double>(w, j, solution.busy[i], solution.quit[i])};
}

ThroughputReport throughput_report(const PopulationLaw& law, const ClusterSolution& solution,
                                   const SlotDurations& slots, const MacTiming& timing) {
  ThroughputReport r;
  r.p_tr = any_transmission_probability(law, solution.tau);
  auto success = success_probabilities(law, solution.tau);
  r.p_s_cluster = std::move(success.per_cluster);
  r.p_s = std::min(success.total, r.p_tr);
  r.throughput = throughput(r.p_tr, r.p_s, slots, timing);
  return r;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

double delta_from_network(const ScenarioConfig& scenario, const MacTiming& timing, double busy,
                          double p_s, double p_tr) {
  TraversalInputs in;
  in.busy_prob = busy;
  in.success_prob = std::min(p_s, p_tr);
  in.any_tx_prob = p_tr;
  in.cw_min = scenario.base_window();
  in.retry_limit = scenario.base_retry_limit();
  return traversal_time(in, slot_durations(scenario.mechanism, timing), timing.idle_slot_us) *
         1e-6;
}

}  // namespace

double initial_traversal_time(const ScenarioConfig& scenario, const MacTiming& timing,
                              DeltaMode mode, const SolverOptions& solver) {
  if (mode != DeltaMode::static_bootstrap || scenario.density_per_m2 == 0.0)
    return delta_from_network(scenario, timing, 0.0, 0.0, 0.0);

  // Every covered device in one homogeneous cluster, no quitting.
  Eigen::VectorXd mean(1);
  mean[0] = scenario.density_per_m2 * std::numbers::pi * scenario.radius_m * scenario.radius_m;
  const auto law = PopulationLaw::poisson(mean);
  Allocation alloc;
  alloc.cw_min = {scenario.base_window()};
  alloc.retry_limit = {scenario.base_retry_limit()};
  SolverOptions opt = solver;
  opt.quit_model = QuitModel::disabled;
  opt.initial_tau.reset();
  const auto sol = solve_fixed_point(law, {1}, alloc, opt);
  const auto succ = success_probabilities(law, sol.tau);
  return delta_from_network(scenario, timing, sol.busy[0], succ.total,
                            any_transmission_probability(law, sol.tau));
}

AnalyticResult analyze(const ScenarioConfig& scenario, const MacTiming& timing,
                       const AnalyticOptions& options) {
  require_valid(scenario, timing);
  if (auto errors = validate(options.solver.tolerances); !errors.empty())
    throw ValidationFailure(std::move(errors));
  const SlotDurations slots = slot_durations(scenario.mechanism, timing);

  AnalyticResult r;
  r.delta_s = initial_traversal_time(scenario, timing, options.delta_mode, options.solver);
  const int outer_max = options.delta_mode == DeltaMode::relaxed
                            ? std::max(1, options.max_outer_iterations)
                            : 1;
  for (int outer = 1;; ++outer) {
    r.partition = partition(scenario.radius_m, scenario.speed_mps, r.delta_s);
    const auto law = PopulationLaw::poisson(r.partition, scenario.density_per_m2);
    r.solution = solve_fixed_point(r.partition, scenario, options.solver);
    r.report = throughput_report(law, r.solution, slots, timing);
    r.outer_iterations = outer;
    if (options.delta_mode != DeltaMode::relaxed) break;

    const double total_mean = law.means().sum();
    const double busy =
        total_mean > 0.0 ? law.means().dot(r.solution.busy) / total_mean : 0.0;
    const double next = delta_from_network(scenario, timing, busy, r.report.p_s, r.report.p_tr);
    const bool settled =
        std::abs(next - r.delta_s) <= options.solver.tolerances.fixed_point_eps * r.delta_s;
    if (settled) {
      r.outer_converged = true;
      break;
    }
    if (outer >= outer_max) {
      r.outer_converged = false;
      break;
    }
    r.delta_s = next;
  }
  return r;
}

}  // namespace uavmac
