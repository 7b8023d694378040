#ifndef CFP_SIMULATE_HPP
#define CFP_SIMULATE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfp/kernels.hpp"
#include "cfp/partitions.hpp"

namespace cfp {

enum class InitialCondition { singletons, single_cluster, given };

struct SimConfig {
  int n = 2;
  double t_end = 1000.0;
  double burn_in = 0.0;
  std::uint64_t seed = 1;
  int replicas = 1;
  bool track_pair = false;
  InitialCondition initial = InitialCondition::singletons;
  std::optional<OccupancyPartition> given;
  bool track_configurations = false;
  bool record_events = false;           // replica 0 only
  std::size_t max_logged_events = 1000000;
};

inline constexpr const char* kRngAlgorithm = "mt19937_64/splitmix64";

/// Per-replica seed: splitmix64 of the run seed advanced replica + 1 steps.
std::uint64_t replica_seed(std::uint64_t seed, int replica);

struct Event {
  double time = 0.0;
  bool coagulation = true;
  int size_a = 0;  // coagulation: the two merging sizes; fragmentation: the two fragments
  int size_b = 0;
};

struct EventLog {
  std::vector<Event> events;
  bool truncated = false;
};

/// Unordered size pair {i, j}, i <= j.
using SizePair = std::pair<int, int>;

struct ReplicaStats {
  double observed_time = 0.0;
  std::vector<double> time_in_k;    // index K, size N + 1
  std::vector<double> count_time;   // integral of m_i dt, index i
  double cluster_time = 0.0;        // integral of K dt
  double together_time = 0.0;
  long together_episodes = 0;
  long apart_episodes = 0;
  double together_duration = 0.0;
  double apart_duration = 0.0;
  long events = 0;
  bool absorbed = false;
  double absorbed_at = 0.0;
  std::map<std::vector<int>, double> config_time;
  std::map<SizePair, long> coagulations;
  std::map<SizePair, long> fragmentations;
};

struct Estimate {
  double value = 0.0;
  double se = 0.0;  // across replicas; NaN with one replica
};

struct SimStats {
  SimConfig config;
  std::string rng_algorithm = kRngAlgorithm;
  std::vector<std::string> warnings;
  std::vector<ReplicaStats> replicas;

  Estimate mean_clusters;
  std::vector<Estimate> pi;           // index K - 1
  std::vector<Estimate> mean_counts;  // index i - 1
  Estimate p2;
  int early_stops = 0;

  /// Time fraction spent in m among time with K(m) clusters, pooled over
  /// replicas (track_configurations only).
  Estimate conditional_config_frequency(const OccupancyPartition& m) const;
  std::map<SizePair, long> total_coagulations() const;
  std::map<SizePair, long> total_fragmentations() const;
};

struct SimResult {
  SimStats stats;
  std::optional<EventLog> log;
};

/// Gillespie simulation, replicas in parallel (OpenMP). Deterministic for a
/// given (kernel, config) regardless of thread count.
SimResult run_ssa(const Kernel& kernel, const SimConfig& config);

/// Single-threaded reference; bit-identical to run_ssa.
SimResult run_ssa_serial(const Kernel& kernel, const SimConfig& config);

/// One replica, exposed for benchmarks.
ReplicaStats run_replica(const Kernel& kernel, const SimConfig& config, int replica, EventLog* log = nullptr);

struct PairTimeEstimate {
  Estimate t_s;
  Estimate t_r;
  Estimate p2;
  double episode_ratio = 0.0;  // T_S / (T_S + T_R)
  long together_episodes = 0;
  long apart_episodes = 0;
  bool reliable = false;  // at least 100 episodes of each kind
};

PairTimeEstimate estimate_pair_times(const SimStats& stats);

/// Ratio estimator sum(y) / sum(x) with the replica-level delta-method
/// standard error.
Estimate ratio_estimate(const std::vector<double>& y, const std::vector<double>& x);

}  // namespace cfp

#endif  // CFP_SIMULATE_HPP
