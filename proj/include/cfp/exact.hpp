#ifndef CFP_EXACT_HPP
#define CFP_EXACT_HPP

#include <optional>
#include <utility>
#include <vector>

#include "cfp/kernels.hpp"
#include "cfp/numeric.hpp"
#include "cfp/partitions.hpp"

namespace cfp {

enum class CnkMethod { recurrence, enumeration };

/// Normalization constants C_{n,k} = sum over P'_{n,k} of prod a_i^{m_i} / m_i!
/// for 0 <= k <= n <= N.
///
/// T is Rational (exact) or LogReal (floating, carried as logarithms).
/// Out-of-range entries read as zero except C_{0,0} = 1, which keeps the
/// moment formulas valid at the boundary.
template <class T>
class CnkTable {
 public:
  CnkTable() = default;
  CnkTable(int n, std::vector<T> weights);

  int n() const { return n_; }
  NumericMode mode() const;
  /// C_{n,k} with the out-of-range convention.
  T operator()(int n, int k) const;
  void set(int n, int k, T value);
  /// a_i for 1 <= i <= N, zero otherwise.
  T weight(int i) const { return i >= 1 && i <= n_ ? weights_[i - 1] : Num<T>::zero(); }
  const std::vector<T>& weights() const { return weights_; }
  bool reachable(int k) const { return k >= 1 && k <= n_ && !Num<T>::is_zero((*this)(n_, k)); }

 private:
  std::size_t offset(int n, int k) const { return static_cast<std::size_t>(n) * (n + 1) / 2 + k; }

  int n_ = 0;
  std::vector<T> weights_;
  std::vector<T> values_;
};

/// Recurrence: (n+1) C_{n+1,k} = sum_{j=0}^{n-k+1} (j+1) a_{j+1} C_{n-j,k-1}.
/// Enumeration: direct sum over partitions (oracle; N <= enumeration cap).
template <class T>
CnkTable<T> compute_cnk(const Kernel& kernel, int n, CnkMethod method = CnkMethod::recurrence);

/// Same as the enumeration method, single-threaded. Kept as the reference
/// for the OpenMP path.
template <class T>
CnkTable<T> compute_cnk_enumeration_serial(const Kernel& kernel, int n);

/// prod a_i^{m_i} / m_i! for one configuration.
template <class T>
T configuration_weight(const CnkTable<T>& table, const OccupancyPartition& m);

/// p'(m | K(m)) = configuration_weight / C_{N,K}.
template <class T>
prob_t<T> config_probability(const CnkTable<T>& table, const OccupancyPartition& m);

/// <M_i>_{N,K} = a_i C_{N-i,K-1} / C_{N,K}; exactly 0 when i > N - K + 1.
template <class T>
prob_t<T> mean_count_given_k(const CnkTable<T>& table, int i, int k);

template <class P>
struct Covariance {
  int i = 0;
  int j = 0;
  P value{};
};

/// Means are indexed by size: means[i - 1] = <M_i>.
template <class P>
struct MomentReport {
  int n = 0;
  std::optional<int> k;  // nullopt for the marginal over K
  std::vector<P> means;
  std::vector<P> second_moments;
  std::vector<Covariance<P>> covariances;

  P mean(int i) const { return means.at(static_cast<std::size_t>(i - 1)); }
  P variance(int i) const {
    const P m = mean(i);
    return second_moments.at(static_cast<std::size_t>(i - 1)) - m * m;
  }
};

/// Conditional means, second moments <M_i^2>_{N,K} and the requested
/// covariances <M_i M_j> - <M_i><M_j>.
template <class T>
MomentReport<prob_t<T>> moments_given_k(const CnkTable<T>& table, int k,
                                        const std::vector<std::pair<int, int>>& pairs = {});

/// s[K] for K = 1..N-1 and f[K] for K = 2..N, indexed directly by K.
template <class P>
struct RateSchedule {
  int n = 0;
  std::vector<P> s;  // size N + 1, s[N] = 0
  std::vector<P> f;  // size N + 1, f[1] = 0
  std::vector<bool> reachable;  // C_{N,K} > 0, indexed by K

  P sep(int k) const { return s.at(static_cast<std::size_t>(k)); }
  P form(int k) const { return f.at(static_cast<std::size_t>(k)); }
};

enum class FormationMethod { closed_form, enumeration };

/// s_K = sum_i d(i) a_i C_{N-i,K-1} / C_{N,K}.
/// f_K = K(K-1)/2 for unit coagulation; otherwise
/// f_K = sum_{i,j} C(i,j) a_i a_j C_{N-i-j,K-2} / (2 C_{N,K}),
/// or the expectation over P'_{N,K} with FormationMethod::enumeration.
template <class T>
RateSchedule<prob_t<T>> rate_schedule(const Kernel& kernel, const CnkTable<T>& table,
                                      FormationMethod method = FormationMethod::closed_form);

template <class P>
struct ClusterCountDistribution {
  int n = 0;
  std::vector<P> pi;  // pi[K - 1] = Pi_K

  P operator[](int k) const { return pi.at(static_cast<std::size_t>(k - 1)); }
  static ClusterCountDistribution delta(int n, int k);
};

/// Pi_K / Pi_{K-1} = s_{K-1} / f_K, ladder from the smallest reachable K.
template <class P>
ClusterCountDistribution<P> steady_state_pi(const RateSchedule<P>& rates);

/// Classical RK4 on the birth-death master equation. dt <= 0 picks
/// 0.1 / max_K (f_K + s_K).
template <class P>
ClusterCountDistribution<double> transient_pi(const RateSchedule<P>& rates, const ClusterCountDistribution<double>& p0,
                                              double t, double dt = 0.0);

/// <M_i> = sum_K Pi_K <M_i>_{N,K}, and likewise for <M_i^2>.
template <class T>
MomentReport<prob_t<T>> marginal_moments(const CnkTable<T>& table, const ClusterCountDistribution<prob_t<T>>& pi);

/// sum_j j^2 <M_j>_{N,K}.
template <class T>
prob_t<T> sum_squares_given_k(const CnkTable<T>& table, int k);

/// <P_2> = (1/(N(N-1))) sum_K Pi_K sum_j j^2 <M_j>_{N,K} - 1/(N-1).
template <class T>
prob_t<T> p2_exact(const CnkTable<T>& table, const ClusterCountDistribution<prob_t<T>>& pi);

/// Stationary probability of every configuration: p'(m|K) Pi_K.
template <class T>
std::vector<prob_t<T>> configuration_distribution(const CnkTable<T>& table, const PartitionIndex& index,
                                                  const ClusterCountDistribution<prob_t<T>>& pi);

/// a -> 0 limit of a bounded (or constant) kernel: all mass on the smallest
/// reachable K with the a^K factor cancelled, evaluated exactly.
struct NucleationLimit {
  int k = 0;
  std::vector<std::pair<OccupancyPartition, Rational>> configurations;
  Rational p2;
};

NucleationLimit nucleation_limit(const Kernel& kernel, int n);

/// Convenience bundle used by the CLI and tests.
template <class T>
struct ExactSolution {
  CnkTable<T> table;
  RateSchedule<prob_t<T>> rates;
  ClusterCountDistribution<prob_t<T>> pi;
  MomentReport<prob_t<T>> moments;
  prob_t<T> p2{};
};

template <class T>
ExactSolution<T> solve_exact(const Kernel& kernel, int n);

/// Closed forms displayed for the linear kernel a_i = a i. They drop the
/// 1/K! of the generating-function definition and are kept only to
/// document that discrepancy.
namespace linear_reference {
Rational cnk_displayed(const Rational& a, int n, int k);
Rational mean_count_displayed(int n, int k, int i);
}  // namespace linear_reference

}  // namespace cfp

#endif  // CFP_EXACT_HPP
