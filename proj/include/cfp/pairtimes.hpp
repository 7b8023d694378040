#ifndef CFP_PAIRTIMES_HPP
#define CFP_PAIRTIMES_HPP

#include <map>
#include <optional>
#include <string_view>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "cfp/kernels.hpp"
#include "cfp/partitions.hpp"

namespace cfp {

enum class PairTarget { separation, reunion };

std::string_view to_string(PairTarget t);

/// Configuration plus the location of the two marked particles.
/// Separation: both in one cluster of size k1 (k2 = 0).
/// Reunion: in two distinct clusters of sizes k1 <= k2.
struct PairState {
  OccupancyPartition config;
  int k1 = 0;
  int k2 = 0;

  friend bool operator==(const PairState&, const PairState&) = default;
};

/// Embedded jump chain with one absorbing state at index states.size().
struct PairChain {
  PairTarget target = PairTarget::separation;
  int n = 0;
  std::vector<PairState> states;
  Eigen::MatrixXd jump;          // (S+1) x (S+1), row-stochastic
  std::vector<double> holding;   // 1 / total outflow, transient states
  std::vector<double> absorption_rate;  // rate into the absorbing state

  std::size_t absorbing() const { return states.size(); }
  std::optional<std::size_t> lookup(const PairState& s) const;

  std::map<std::tuple<std::vector<int>, int, int>, std::size_t> index;
};

/// Largest N accepted for each target: 20 (separation) and 14 (reunion),
/// or CFP_MAX_N when set.
int pair_chain_cap(PairTarget target);

PairChain build_pair_chain(const Kernel& kernel, int n, PairTarget target);

struct AbsorptionTimes {
  std::vector<double> t;
  double residual = 0.0;  // ||(I - T) t - tau||_inf / ||tau||_inf
};

/// Solves (I - T) t = tau with partial pivoting.
AbsorptionTimes mean_absorption_times(const PairChain& chain);

enum class StartDistribution {
  equilibrium,  // stationary law conditioned on the pair's status
  entrance      // law of the state at the start of an episode
};

/// Start weights over the chain's transient states, normalized.
std::vector<double> start_distribution(const Kernel& kernel, const PairChain& chain, StartDistribution kind);

struct PairTimesReport {
  int n = 0;
  double t_s = 0.0;  // mean together-episode duration
  double t_r = 0.0;  // mean apart-episode duration
  double p2_ratio = 0.0;
  double p2_exact = 0.0;
  double max_residual = 0.0;
  // Equilibrium-start averages (mean remaining time given the current status).
  double t_s_equilibrium = 0.0;
  double t_r_equilibrium = 0.0;
  std::size_t separation_states = 0;
  std::size_t reunion_states = 0;
};

PairTimesReport pair_times(const Kernel& kernel, int n);

/// Total-variation distance between P2 * p*_together + (1 - P2) * p*_apart,
/// marginalized to configurations, and the stationary configuration law.
double stationarity_gap(const Kernel& kernel, int n);

}  // namespace cfp

#endif  // CFP_PAIRTIMES_HPP
