#include "cfp/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <type_traits>

#include "cfp/errors.hpp"

namespace cfp {

namespace {

template <class P>
constexpr bool is_exact_v = std::is_same_v<P, Rational>;

template <class P>
bool positive(const P& v) {
  return v > 0;
}

void check_n(int n) {
  if (n < 1) throw InvalidArgument("N must be >= 1");
}

template <class T>
void check_finite(const CnkTable<T>& table) {
  if constexpr (std::is_same_v<T, LogReal>) {
    for (int n = 0; n <= table.n(); ++n)
      for (int k = 0; k <= n; ++k)
        if (std::isnan(table(n, k).log()) || table(n, k).log() == std::numeric_limits<double>::infinity())
          throw NumericError("C_{N,K} overflowed in floating mode at N=" + std::to_string(n) + ", K=" +
                             std::to_string(k) + "; rerun in exact (rational) mode");
  }
}

template <class T>
std::vector<T> kernel_weights(const Kernel& kernel, int n) {
  kernel.require_defined(n);
  std::vector<T> w;
  w.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) w.push_back(kernel.weight<T>(i));
  return w;
}

template <class T>
T power_over_factorial(const T& base, int m) {
  if constexpr (std::is_same_v<T, Rational>) {
    Rational r = 1;
    for (int j = 1; j <= m; ++j) r = r * base / j;
    return r;
  } else {
    if (m == 0) return Num<T>::one();
    if (base.is_zero()) return Num<T>::zero();
    return LogReal::from_log(m * base.log() - log_factorial(static_cast<unsigned>(m)));
  }
}

// Pairwise coagulation propensity of a configuration.
template <class T>
T coagulation_total(const Kernel& kernel, const OccupancyPartition& m) {
  T total = Num<T>::zero();
  const int n = m.n();
  for (int i = 1; i <= n; ++i) {
    if (m.m(i) == 0) continue;
    if (m.m(i) >= 2 && 2 * i <= n) {
      const long long pairs = static_cast<long long>(m.m(i)) * (m.m(i) - 1) / 2;
      total += kernel.coag<T>(i, i) * Num<T>::from_int(pairs);
    }
    for (int j = i + 1; i + j <= n; ++j) {
      if (m.m(j) == 0) continue;
      total += kernel.coag<T>(i, j) * Num<T>::from_int(static_cast<long long>(m.m(i)) * m.m(j));
    }
  }
  return total;
}

template <class T>
void fill_row_by_enumeration(CnkTable<T>& table, const Kernel& kernel, int row) {
  const int cap = kernel.max_size().value_or(row);
  std::vector<T> sums(static_cast<std::size_t>(row) + 1, Num<T>::zero());
  for_each_partition(row, cap, 0, [&](const OccupancyPartition& m) {
    T w = Num<T>::one();
    for (int i = 1; i <= row; ++i)
      if (m.m(i) > 0) w *= power_over_factorial(table.weight(i), m.m(i));
    sums[static_cast<std::size_t>(m.clusters())] += w;
  });
  for (int k = 1; k <= row; ++k) table.set(row, k, sums[static_cast<std::size_t>(k)]);
}

}  // namespace

// ---------------------------------------------------------------- CnkTable

template <class T>
CnkTable<T>::CnkTable(int n, std::vector<T> weights)
    : n_(n), weights_(std::move(weights)), values_(static_cast<std::size_t>(n + 1) * (n + 2) / 2, Num<T>::zero()) {
  if (n < 0) throw InvalidArgument("table size must be non-negative");
  if (weights_.size() != static_cast<std::size_t>(n)) throw InvalidArgument("weight list must have length N");
  values_[offset(0, 0)] = Num<T>::one();
}

template <class T>
NumericMode CnkTable<T>::mode() const {
  return std::is_same_v<T, Rational> ? NumericMode::exact : NumericMode::floating;
}

template <class T>
T CnkTable<T>::operator()(int n, int k) const {
  if (n < 0 || k < 0 || k > n || n > n_) return Num<T>::zero();
  return values_[offset(n, k)];
}

template <class T>
void CnkTable<T>::set(int n, int k, T value) {
  if (n < 0 || k < 0 || k > n || n > n_) throw InvalidArgument("C_{n,k} index out of range");
  values_[offset(n, k)] = std::move(value);
}

// ---------------------------------------------------------------- compute_cnk

template <class T>
CnkTable<T> compute_cnk(const Kernel& kernel, int n, CnkMethod method) {
  check_n(n);
  CnkTable<T> table(n, kernel_weights<T>(kernel, n));
  if (method == CnkMethod::enumeration) {
    if (n > enumeration_cap()) throw ResourceError("enumeration oracle refused for N = " + std::to_string(n));
#pragma omp parallel for schedule(dynamic, 1)
    for (int row = n; row >= 1; --row) fill_row_by_enumeration(table, kernel, row);
  } else {
    // j a_j is shared by every (row, k).
    std::vector<T> scaled(static_cast<std::size_t>(n) + 1, Num<T>::zero());
    for (int j = 1; j <= n; ++j) scaled[static_cast<std::size_t>(j)] = Num<T>::from_int(j) * table.weight(j);
    for (int row = 1; row <= n; ++row) {
      const T inv_row = Num<T>::one() / Num<T>::from_int(row);
      for (int k = 1; k <= row; ++k) {
        // row C_{row,k} = sum_{j=1}^{row-k+1} j a_j C_{row-j,k-1}
        T acc = Num<T>::zero();
        for (int j = 1; j <= row - k + 1; ++j) {
          const T prev = table(row - j, k - 1);
          if (!Num<T>::is_zero(prev)) acc += scaled[static_cast<std::size_t>(j)] * prev;
        }
        table.set(row, k, acc * inv_row);
      }
    }
  }
  check_finite(table);
  return table;
}

template <class T>
CnkTable<T> compute_cnk_enumeration_serial(const Kernel& kernel, int n) {
  check_n(n);
  if (n > enumeration_cap()) throw ResourceError("enumeration oracle refused for N = " + std::to_string(n));
  CnkTable<T> table(n, kernel_weights<T>(kernel, n));
  for (int row = 1; row <= n; ++row) fill_row_by_enumeration(table, kernel, row);
  check_finite(table);
  return table;
}

// ---------------------------------------------------------------- configurations

template <class T>
T configuration_weight(const CnkTable<T>& table, const OccupancyPartition& m) {
  if (m.n() != table.n()) throw InvalidArgument("configuration is not a partition of the table's N");
  T w = Num<T>::one();
  for (int i = 1; i <= m.n(); ++i)
    if (m.m(i) > 0) w *= power_over_factorial(table.weight(i), m.m(i));
  return w;
}

template <class T>
prob_t<T> config_probability(const CnkTable<T>& table, const OccupancyPartition& m) {
  const int k = m.clusters();
  const T c = table(table.n(), k);
  if (Num<T>::is_zero(c))
    throw UnreachableConfiguration("C_{N,K} = 0 for K = " + std::to_string(k) + ": no reachable configuration");
  return Num<T>::ratio(configuration_weight(table, m), c);
}

template <class T>
prob_t<T> mean_count_given_k(const CnkTable<T>& table, int i, int k) {
  const int n = table.n();
  if (i < 1 || i > n) throw InvalidArgument("cluster size out of range");
  if (k < 1 || k > n) throw InvalidArgument("cluster count out of range");
  const T c = table(n, k);
  if (Num<T>::is_zero(c)) throw UnreachableConfiguration("C_{N,K} = 0 for K = " + std::to_string(k));
  if (i > n - k + 1) return prob_t<T>(0);
  return Num<T>::ratio(table.weight(i) * table(n - i, k - 1), c);
}

template <class T>
MomentReport<prob_t<T>> moments_given_k(const CnkTable<T>& table, int k, const std::vector<std::pair<int, int>>& pairs) {
  using P = prob_t<T>;
  const int n = table.n();
  if (k < 1 || k > n) throw InvalidArgument("cluster count out of range");
  const T c = table(n, k);
  if (Num<T>::is_zero(c)) throw UnreachableConfiguration("C_{N,K} = 0 for K = " + std::to_string(k));
  MomentReport<P> report;
  report.n = n;
  report.k = k;
  for (int i = 1; i <= n; ++i) {
    const P mean = mean_count_given_k(table, i, k);
    const T ai = table.weight(i);
    const P pair_term = Num<T>::ratio(ai * ai * table(n - 2 * i, k - 2), c);
    report.means.push_back(mean);
    report.second_moments.push_back(pair_term + mean);
  }
  for (auto [i, j] : pairs) {
    if (i < 1 || i > n || j < 1 || j > n) throw InvalidArgument("covariance index out of range");
    P value;
    if (i == j) {
      value = report.variance(i);
    } else {
      const P joint = Num<T>::ratio(table.weight(i) * table.weight(j) * table(n - i - j, k - 2), c);
      value = joint - report.mean(i) * report.mean(j);
    }
    report.covariances.push_back({i, j, value});
  }
  return report;
}

// ---------------------------------------------------------------- rates and Pi_K

template <class T>
RateSchedule<prob_t<T>> rate_schedule(const Kernel& kernel, const CnkTable<T>& table, FormationMethod method) {
  using P = prob_t<T>;
  const int n = table.n();
  RateSchedule<P> rates;
  rates.n = n;
  rates.s.assign(static_cast<std::size_t>(n) + 1, P(0));
  rates.f.assign(static_cast<std::size_t>(n) + 1, P(0));
  rates.reachable.assign(static_cast<std::size_t>(n) + 1, false);

  std::vector<T> weighted_d(static_cast<std::size_t>(n) + 1, Num<T>::zero());
  for (int i = 2; i <= n; ++i)
    weighted_d[static_cast<std::size_t>(i)] = total_dissociation<T>(kernel, i) * table.weight(i);

  const bool unit = kernel.unit_coagulation(n);
  for (int k = 1; k <= n; ++k) {
    const T c = table(n, k);
    if (Num<T>::is_zero(c)) continue;
    rates.reachable[static_cast<std::size_t>(k)] = true;
    if (k < n) {
      T num = Num<T>::zero();
      for (int i = 2; i <= n - k + 1; ++i) {
        const T prev = table(n - i, k - 1);
        if (!Num<T>::is_zero(prev)) num += weighted_d[static_cast<std::size_t>(i)] * prev;
      }
      rates.s[static_cast<std::size_t>(k)] = Num<T>::ratio(num, c);
    }
    if (k < 2) continue;
    if (unit && method == FormationMethod::closed_form) {
      rates.f[static_cast<std::size_t>(k)] = P(static_cast<long long>(k) * (k - 1) / 2);
    } else if (method == FormationMethod::closed_form) {
      // Ordered (i, j): each unordered pair of distinct sizes appears twice,
      // each same-size pair contributes m_i (m_i - 1) = 2 * pairs.
      T num = Num<T>::zero();
      for (int i = 1; i <= n - k + 1; ++i) {
        for (int j = 1; i + j <= n - k + 2; ++j) {
          const T rest = table(n - i - j, k - 2);
          if (Num<T>::is_zero(rest)) continue;
          num += kernel.coag<T>(i, j) * table.weight(i) * table.weight(j) * rest;
        }
      }
      rates.f[static_cast<std::size_t>(k)] = Num<T>::ratio(num, c * Num<T>::from_int(2));
    } else {
      if (n > enumeration_cap()) throw ResourceError("formation-rate enumeration refused for N = " + std::to_string(n));
      T num = Num<T>::zero();
      for_each_partition(n, kernel.max_size().value_or(n), k, [&](const OccupancyPartition& m) {
        num += configuration_weight(table, m) * coagulation_total<T>(kernel, m);
      });
      rates.f[static_cast<std::size_t>(k)] = Num<T>::ratio(num, c);
    }
  }
  return rates;
}

template <class P>
ClusterCountDistribution<P> ClusterCountDistribution<P>::delta(int n, int k) {
  if (k < 1 || k > n) throw InvalidArgument("cluster count out of range");
  ClusterCountDistribution<P> d;
  d.n = n;
  d.pi.assign(static_cast<std::size_t>(n), P(0));
  d.pi[static_cast<std::size_t>(k - 1)] = P(1);
  return d;
}

template <class P>
ClusterCountDistribution<P> steady_state_pi(const RateSchedule<P>& rates) {
  const int n = rates.n;
  check_n(n);
  if (n == 1) return ClusterCountDistribution<P>::delta(1, 1);

  int k0 = 0;
  for (int k = 1; k <= n; ++k)
    if (rates.reachable[static_cast<std::size_t>(k)]) {
      k0 = k;
      break;
    }
  bool any_rate = false;
  for (int k = 1; k <= n; ++k) any_rate = any_rate || positive(rates.s[k]) || positive(rates.f[k]);
  if (k0 == 0 || !any_rate) throw DegenerateChain("all separation and formation rates are zero");

  // Unnormalized ladder; log space in floating mode.
  std::vector<P> ladder(static_cast<std::size_t>(n) + 1, P(0));
  std::vector<double> log_ladder(static_cast<std::size_t>(n) + 1, -std::numeric_limits<double>::infinity());
  ladder[static_cast<std::size_t>(k0)] = P(1);
  log_ladder[static_cast<std::size_t>(k0)] = 0.0;
  for (int k = k0 + 1; k <= n; ++k) {
    const P s = rates.s[static_cast<std::size_t>(k - 1)];
    const P f = rates.f[static_cast<std::size_t>(k)];
    const bool prev_alive = std::isfinite(log_ladder[static_cast<std::size_t>(k - 1)]);
    if (!positive(s) || !prev_alive) continue;
    if (!positive(f))
      throw DegenerateChain("formation rate f_" + std::to_string(k) + " is zero while s_" + std::to_string(k - 1) +
                            " > 0");
    if constexpr (is_exact_v<P>) {
      ladder[static_cast<std::size_t>(k)] = ladder[static_cast<std::size_t>(k - 1)] * s / f;
    }
    log_ladder[static_cast<std::size_t>(k)] =
        log_ladder[static_cast<std::size_t>(k - 1)] + std::log(to_double(s)) - std::log(to_double(f));
  }

  ClusterCountDistribution<P> out;
  out.n = n;
  out.pi.assign(static_cast<std::size_t>(n), P(0));
  if constexpr (is_exact_v<P>) {
    P total = 0;
    for (int k = 1; k <= n; ++k) total += ladder[static_cast<std::size_t>(k)];
    for (int k = 1; k <= n; ++k) out.pi[static_cast<std::size_t>(k - 1)] = ladder[static_cast<std::size_t>(k)] / total;
  } else {
    LogReal total;
    for (int k = 1; k <= n; ++k) total += LogReal::from_log(log_ladder[static_cast<std::size_t>(k)]);
    for (int k = 1; k <= n; ++k)
      out.pi[static_cast<std::size_t>(k - 1)] = std::exp(log_ladder[static_cast<std::size_t>(k)] - total.log());
  }
  return out;
}

template <class P>
ClusterCountDistribution<double> transient_pi(const RateSchedule<P>& rates, const ClusterCountDistribution<double>& p0,
                                              double t, double dt) {
  const int n = rates.n;
  if (p0.n != n || p0.pi.size() != static_cast<std::size_t>(n))
    throw InvalidArgument("initial distribution has the wrong N");
  if (t < 0) throw InvalidArgument("time must be non-negative");
  double mass = 0.0;
  for (double p : p0.pi) {
    if (p < 0) throw InvalidArgument("initial distribution has a negative entry");
    mass += p;
  }
  if (std::abs(mass - 1.0) > 1e-9) throw InvalidArgument("initial distribution is not normalized");

  std::vector<double> s(static_cast<std::size_t>(n) + 2, 0.0), f(static_cast<std::size_t>(n) + 2, 0.0);
  double max_out = 0.0;
  for (int k = 1; k <= n; ++k) {
    s[static_cast<std::size_t>(k)] = to_double(rates.s[static_cast<std::size_t>(k)]);
    f[static_cast<std::size_t>(k)] = to_double(rates.f[static_cast<std::size_t>(k)]);
    max_out = std::max(max_out, s[static_cast<std::size_t>(k)] + f[static_cast<std::size_t>(k)]);
  }
  if (dt <= 0.0) dt = max_out > 0 ? 0.1 / max_out : 1.0;
  if (dt * max_out > 1.0)
    throw InvalidArgument("dt = " + format_double(dt) + " exceeds the stability bound; use dt <= " +
                          format_double(0.1 / max_out));

  ClusterCountDistribution<double> out = p0;
  if (t == 0.0) return out;

  // y[k - 1] = P_K
  auto deriv = [&](const std::vector<double>& y, std::vector<double>& dy) {
    for (int k = 1; k <= n; ++k) {
      const auto K = static_cast<std::size_t>(k);
      double v = -(f[K] + s[K]) * y[K - 1];
      if (k < n) v += f[K + 1] * y[K];
      if (k > 1) v += s[K - 1] * y[K - 2];
      dy[K - 1] = v;
    }
  };
  std::vector<double> y = p0.pi, k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());
  const auto steps = static_cast<long long>(std::ceil(t / dt - 1e-12));
  const double h = t / static_cast<double>(steps);
  for (long long step = 0; step < steps; ++step) {
    deriv(y, k1);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    deriv(tmp, k2);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    deriv(tmp, k3);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + h * k3[i];
    deriv(tmp, k4);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  double total = 0.0;
  for (double& v : y) {
    v = std::max(v, 0.0);
    total += v;
  }
  for (double& v : y) v /= total;
  out.pi = std::move(y);
  return out;
}

// ---------------------------------------------------------------- marginals and P2

template <class T>
MomentReport<prob_t<T>> marginal_moments(const CnkTable<T>& table, const ClusterCountDistribution<prob_t<T>>& pi) {
  using P = prob_t<T>;
  const int n = table.n();
  if (pi.n != n) throw InvalidArgument("distribution and table disagree on N");
  MomentReport<P> report;
  report.n = n;
  report.means.assign(static_cast<std::size_t>(n), P(0));
  report.second_moments.assign(static_cast<std::size_t>(n), P(0));
  for (int k = 1; k <= n; ++k) {
    const P w = pi[k];
    if (!positive(w)) continue;
    const auto cond = moments_given_k(table, k);
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
      report.means[i] += w * cond.means[i];
      report.second_moments[i] += w * cond.second_moments[i];
    }
  }
  return report;
}

template <class T>
prob_t<T> sum_squares_given_k(const CnkTable<T>& table, int k) {
  using P = prob_t<T>;
  P total(0);
  for (int j = 1; j <= table.n() - k + 1; ++j) total += P(static_cast<long long>(j) * j) * mean_count_given_k(table, j, k);
  return total;
}

template <class T>
prob_t<T> p2_exact(const CnkTable<T>& table, const ClusterCountDistribution<prob_t<T>>& pi) {
  using P = prob_t<T>;
  const int n = table.n();
  if (n < 2) throw InvalidArgument("<P2> needs N >= 2");
  if (pi.n != n) throw InvalidArgument("distribution and table disagree on N");
  P acc(0);
  for (int k = 1; k <= n; ++k) {
    const P w = pi[k];
    if (!positive(w)) continue;
    acc += w * sum_squares_given_k(table, k);
  }
  const P nn = P(static_cast<long long>(n) * (n - 1));
  P result = acc / nn - P(1) / P(n - 1);
  if constexpr (!is_exact_v<P>) result = std::clamp(result, 0.0, 1.0);
  return result;
}

template <class T>
std::vector<prob_t<T>> configuration_distribution(const CnkTable<T>& table, const PartitionIndex& index,
                                                  const ClusterCountDistribution<prob_t<T>>& pi) {
  using P = prob_t<T>;
  std::vector<P> out;
  out.reserve(index.size());
  for (const auto& m : index) {
    const P w = pi[m.clusters()];
    out.push_back(positive(w) ? w * config_probability(table, m) : P(0));
  }
  return out;
}

template <class T>
ExactSolution<T> solve_exact(const Kernel& kernel, int n) {
  ExactSolution<T> sol;
  sol.table = compute_cnk<T>(kernel, n);
  sol.rates = rate_schedule(kernel, sol.table);
  sol.pi = steady_state_pi(sol.rates);
  sol.moments = marginal_moments(sol.table, sol.pi);
  if (n >= 2) sol.p2 = p2_exact(sol.table, sol.pi);
  else sol.p2 = prob_t<T>(1);
  return sol;
}

NucleationLimit nucleation_limit(const Kernel& kernel, int n) {
  check_n(n);
  KernelSpec unit;
  switch (kernel.family()) {
    case KernelFamily::bounded:
      unit = KernelSpec::bounded(1, *kernel.max_size());
      break;
    case KernelFamily::constant:
      unit = KernelSpec::constant(1);
      break;
    default:
      throw InvalidArgument("the nucleation limit is defined for constant and bounded kernels only");
  }
  const Kernel k1(unit);
  const auto table = compute_cnk<Rational>(k1, n);
  NucleationLimit out;
  for (int k = 1; k <= n; ++k)
    if (table.reachable(k)) {
      out.k = k;
      break;
    }
  if (out.k == 0) throw DegenerateChain("no reachable cluster count");
  const auto index = enumerate_occupancy_given_k(n, out.k, std::min(k1.max_size().value_or(n), n));
  for (const auto& m : index) out.configurations.emplace_back(m, config_probability(table, m));
  out.p2 = n >= 2 ? p2_exact(table, ClusterCountDistribution<Rational>::delta(n, out.k)) : Rational(1);
  return out;
}

namespace linear_reference {

Rational cnk_displayed(const Rational& a, int n, int k) {
  if (k < 1 || k > n) return 0;
  Rational ak = 1;
  for (int j = 0; j < k; ++j) ak *= a;
  return ak * Rational(binomial(static_cast<unsigned>(n + k - 1), static_cast<unsigned>(n - k)));
}

Rational mean_count_displayed(int n, int k, int i) {
  if (k < 2 || n - k - i + 1 < 0) return 0;
  const Rational num(binomial(static_cast<unsigned>(n - i + k - 2), static_cast<unsigned>(n - k - i + 1)));
  const Rational den(binomial(static_cast<unsigned>(n + k - 1), static_cast<unsigned>(n - k)));
  return Rational(i) * num / den;
}

}  // namespace linear_reference

// ---------------------------------------------------------------- instantiations

#define CFP_INSTANTIATE_EXACT(T)                                                                               \
  template class CnkTable<T>;                                                                                  \
  template CnkTable<T> compute_cnk<T>(const Kernel&, int, CnkMethod);                                          \
  template CnkTable<T> compute_cnk_enumeration_serial<T>(const Kernel&, int);                                  \
  template T configuration_weight<T>(const CnkTable<T>&, const OccupancyPartition&);                           \
  template prob_t<T> config_probability<T>(const CnkTable<T>&, const OccupancyPartition&);                     \
  template prob_t<T> mean_count_given_k<T>(const CnkTable<T>&, int, int);                                      \
  template MomentReport<prob_t<T>> moments_given_k<T>(const CnkTable<T>&, int,                                 \
                                                      const std::vector<std::pair<int, int>>&);                \
  template RateSchedule<prob_t<T>> rate_schedule<T>(const Kernel&, const CnkTable<T>&, FormationMethod);       \
  template MomentReport<prob_t<T>> marginal_moments<T>(const CnkTable<T>&,                                     \
                                                       const ClusterCountDistribution<prob_t<T>>&);            \
  template prob_t<T> sum_squares_given_k<T>(const CnkTable<T>&, int);                                          \
  template prob_t<T> p2_exact<T>(const CnkTable<T>&, const ClusterCountDistribution<prob_t<T>>&);              \
  template std::vector<prob_t<T>> configuration_distribution<T>(const CnkTable<T>&, const PartitionIndex&,     \
                                                                const ClusterCountDistribution<prob_t<T>>&);   \
  template ExactSolution<T> solve_exact<T>(const Kernel&, int);

CFP_INSTANTIATE_EXACT(Rational)
CFP_INSTANTIATE_EXACT(LogReal)
#undef CFP_INSTANTIATE_EXACT

template struct ClusterCountDistribution<Rational>;
template struct ClusterCountDistribution<double>;
template ClusterCountDistribution<Rational> steady_state_pi<Rational>(const RateSchedule<Rational>&);
template ClusterCountDistribution<double> steady_state_pi<double>(const RateSchedule<double>&);
template ClusterCountDistribution<double> transient_pi<Rational>(const RateSchedule<Rational>&,
                                                                 const ClusterCountDistribution<double>&, double,
                                                                 double);
template ClusterCountDistribution<double> transient_pi<double>(const RateSchedule<double>&,
                                                               const ClusterCountDistribution<double>&, double, double);

}  // namespace cfp
