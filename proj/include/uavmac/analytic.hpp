#ifndef UAVMAC_ANALYTIC_HPP
#define UAVMAC_ANALYTIC_HPP

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "uavmac/chain.hpp"
#include "uavmac/core.hpp"
#include "uavmac/geometry.hpp"
#include "uavmac/timing.hpp"

namespace uavmac {

/// How the own-cluster factor of the busy probability is evaluated.
/// `verbatim` sums over every n >= 1 with the unconditioned Poisson weights;
/// `normalized` conditions on the cluster being non-empty.
enum class BusyModel { verbatim, normalized };

/// `derived`: Q_i = (1 - P_eq^{J_i})^{m_i}, the chance a packet never reaches
/// (J, 0) in any of the m_i traversals. `stationary`: p_final is the raw
/// stationary mass b_{J,0}. `disabled`: Q = 0 (the classic static chain).
enum class QuitModel { derived, stationary, disabled };

/// Where the traversal time used to cut the clusters comes from.
enum class DeltaMode { contention_free, static_bootstrap, relaxed };

std::string_view to_string(BusyModel m);
std::string_view to_string(QuitModel m);
std::string_view to_string(DeltaMode m);
BusyModel parse_busy_model(std::string_view text);
QuitModel parse_quit_model(std::string_view text);
DeltaMode parse_delta_mode(std::string_view text);

/// Per-cluster device count law: Poisson with the given means, or a fixed
/// count per cluster (the classic static model).
class PopulationLaw {
 public:
  static PopulationLaw poisson(Eigen::VectorXd means);
  static PopulationLaw poisson(const ClusterPartition& partition, double density);
  static PopulationLaw fixed(Eigen::VectorXi counts);

  [[nodiscard]] bool is_fixed() const { return fixed_; }
  [[nodiscard]] int size() const { return static_cast<int>(means_.size()); }
  [[nodiscard]] const Eigen::VectorXd& means() const { return means_; }

  /// E[(1 - tau)^n].
  [[nodiscard]] double idle_factor(int i, double tau) const;
  /// Sum over n >= 1 of f(n) (1 - tau)^{n-1}.
  [[nodiscard]] double own_factor(int i, double tau, BusyModel model) const;
  /// E[n tau (1 - tau)^{n-1}].
  [[nodiscard]] double success_factor(int i, double tau) const;

 private:
  bool fixed_ = false;
  Eigen::VectorXd means_;  // Poisson means, or the counts as doubles
};

/// q_i for every cluster: 1 - prod_{h != i} idle_factor(h) * own_factor(i).
[[nodiscard]] Eigen::VectorXd busy_probabilities(const PopulationLaw& law,
                                                 const Eigen::VectorXd& tau,
                                                 BusyModel model = BusyModel::verbatim);
/// q_i for the 0-based cluster `i` of a Poisson-populated partition.
[[nodiscard]] double busy_probability(int i, const ClusterPartition& partition, double density,
                                      const Eigen::VectorXd& tau,
                                      BusyModel model = BusyModel::verbatim);

[[nodiscard]] double any_transmission_probability(const PopulationLaw& law,
                                                  const Eigen::VectorXd& tau);
[[nodiscard]] double any_transmission_probability(const ClusterPartition& partition,
                                                  double density, const Eigen::VectorXd& tau);

struct SuccessProbabilities {
  Eigen::VectorXd per_cluster;
  double total = 0.0;
};

[[nodiscard]] SuccessProbabilities success_probabilities(const PopulationLaw& law,
                                                         const Eigen::VectorXd& tau);
[[nodiscard]] SuccessProbabilities success_probabilities(const ClusterPartition& partition,
                                                         double density,
                                                         const Eigen::VectorXd& tau);

/// Saturation throughput, the payload fraction of channel time:
///   S = P_s T_E / ((1 - P_tr) delta + P_s T_s + (P_tr - P_s) T_c)
/// with P_s the unconditional per-slot success probability. Returns 0 when
/// the denominator vanishes; throws "bad-probability" if P_s > P_tr.
[[nodiscard]] double throughput(double p_tr, double p_s, const SlotDurations& slots,
                                const MacTiming& timing);

/// Per-cluster initial window and retry limit.
struct Allocation {
  std::vector<std::int64_t> cw_min;
  std::vector<int> retry_limit;
};

/// W_i = max(1, ceil((1 - t_i/T) CW)), J_i = ceil(J_max t_i / T) with
/// t_i = i delta and T = N delta, in exact integer arithmetic.
[[nodiscard]] Allocation modified_allocation(int n_clusters, std::int64_t cw_min_max,
                                             int retry_limit_max);
[[nodiscard]] Allocation modified_allocation(const ClusterPartition& partition,
                                             std::int64_t cw_min_max, int retry_limit_max);
/// Uniform (W_0, J) for conventional, modified_allocation otherwise.
[[nodiscard]] Allocation allocation(const ScenarioConfig& scenario, int n_clusters);

struct ClusterSolution {
  Eigen::VectorXd busy;        // q_i
  Eigen::VectorXd tau;         // tau_i
  Eigen::VectorXd quit;        // Q_i
  Eigen::VectorXd stall;       // P_eq(i)
  Eigen::VectorXd base_state;  // b_{i,0,0}
  std::vector<std::int64_t> cw_min;
  std::vector<int> retry_limit;
  std::vector<std::int64_t> traversal_counts;
  int iterations = 0;
  double residual = 0.0;
  bool used_bisection = false;

  [[nodiscard]] int size() const { return static_cast<int>(tau.size()); }
};

struct SolverOptions {
  Tolerances tolerances;
  BusyModel busy_model = BusyModel::verbatim;
  QuitModel quit_model = QuitModel::derived;
  std::optional<Eigen::VectorXd> initial_tau;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, Eigen::VectorXd tau,
                   Eigen::VectorXd quit)
      : Error("no-convergence", what),
        residual_(residual),
        tau_(std::move(tau)),
        quit_(std::move(quit)) {}
  [[nodiscard]] double residual() const { return residual_; }
  [[nodiscard]] const Eigen::VectorXd& tau() const { return tau_; }
  [[nodiscard]] const Eigen::VectorXd& quit() const { return quit_; }

 private:
  double residual_;
  Eigen::VectorXd tau_;
  Eigen::VectorXd quit_;
};

/// Damped successive substitution on tau from tau = 0, with each Q_i solved
/// exactly for the current busy probability. The returned
/// iterate is the one whose map residual (inf-norm) was <= fixed_point_eps,
/// so solving again from it returns it unchanged. A single cluster that
/// stalls for 500 sweeps falls back to bisection on tau.
[[nodiscard]] ClusterSolution solve_fixed_point(const PopulationLaw& law,
                                                const std::vector<std::int64_t>& traversal_counts,
                                                const Allocation& alloc,
                                                const SolverOptions& options = {});
[[nodiscard]] ClusterSolution solve_fixed_point(const ClusterPartition& partition,
                                                const ScenarioConfig& scenario,
                                                const SolverOptions& options = {});

struct StationaryDistribution {
  ChainLayout layout;
  Eigen::VectorXd b;
  [[nodiscard]] double at(int j, std::int64_t k) const { return b[layout.index(j, k)]; }
};

/// b_{i,j,k} of the 0-based cluster `i`.
[[nodiscard]] StationaryDistribution stationary_distribution(const ClusterSolution& solution,
                                                             int i);

struct ThroughputReport {
  double p_tr = 0.0;
  Eigen::VectorXd p_s_cluster;
  double p_s = 0.0;
  double throughput = 0.0;
};

[[nodiscard]] ThroughputReport throughput_report(const PopulationLaw& law,
                                                 const ClusterSolution& solution,
                                                 const SlotDurations& slots,
                                                 const MacTiming& timing);

struct AnalyticOptions {
  SolverOptions solver;
  DeltaMode delta_mode = DeltaMode::contention_free;
  int max_outer_iterations = 20;
};

/// Delta, in seconds, before any clustering: the contention-free traversal
/// or the static homogeneous bootstrap.
[[nodiscard]] double initial_traversal_time(const ScenarioConfig& scenario,
                                            const MacTiming& timing, DeltaMode mode,
                                            const SolverOptions& solver = {});

struct AnalyticResult {
  double delta_s = 0.0;
  ClusterPartition partition;
  ClusterSolution solution;
  ThroughputReport report;
  int outer_iterations = 1;
  bool outer_converged = true;
};

/// geometry -> traversal time -> fixed point -> throughput. With no device
/// in range (density 0) the result is the contention-free solution and S = 0.
[[nodiscard]] AnalyticResult analyze(const ScenarioConfig& scenario, const MacTiming& timing,
                                     const AnalyticOptions& options = {});

}  // namespace uavmac

#endif  // UAVMAC_ANALYTIC_HPP
