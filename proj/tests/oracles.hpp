#ifndef CFP_TESTS_ORACLES_HPP
#define CFP_TESTS_ORACLES_HPP

// Independent reference computations. None of these call into the library
// beyond its value types.

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "cfp/numeric.hpp"

namespace oracle {

using cfp::Rational;

// Euler's pentagonal-number recurrence for q(n).
inline std::vector<long long> partition_counts(int n) {
  std::vector<long long> p(static_cast<std::size_t>(n) + 1, 0);
  p[0] = 1;
  for (int m = 1; m <= n; ++m) {
    long long s = 0;
    for (int k = 1;; ++k) {
      const int g1 = k * (3 * k - 1) / 2;
      const int g2 = k * (3 * k + 1) / 2;
      if (g1 > m) break;
      const long long sign = (k % 2 == 1) ? 1 : -1;
      s += sign * p[static_cast<std::size_t>(m - g1)];
      if (g2 <= m) s += sign * p[static_cast<std::size_t>(m - g2)];
    }
    p[static_cast<std::size_t>(m)] = s;
  }
  return p;
}

// All partitions of n as dense occupancy vectors, built from the 2^(n-1)
// compositions and deduplicated. Only usable for small n.
inline std::set<std::vector<int>> partitions_by_compositions(int n) {
  std::set<std::vector<int>> out;
  const unsigned long total = 1UL << (n - 1);
  for (unsigned long mask = 0; mask < total; ++mask) {
    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    int run = 1;
    for (int b = 0; b < n - 1; ++b) {
      if (mask & (1UL << b)) {
        ++counts[static_cast<std::size_t>(run - 1)];
        run = 1;
      } else {
        ++run;
      }
    }
    ++counts[static_cast<std::size_t>(run - 1)];
    out.insert(counts);
  }
  return out;
}

inline int clusters(const std::vector<int>& m) {
  int k = 0;
  for (int c : m) k += c;
  return k;
}

// prod a_i^{m_i} / m_i! with a given by value (1-based).
template <class Weight>
Rational weight(const std::vector<int>& m, Weight a) {
  Rational w = 1;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (int r = 1; r <= m[i]; ++r) w = w * a(static_cast<int>(i) + 1) / r;
  return w;
}

// Configuration-space sums over P'_{n,k} for a weight function a.
template <class Weight>
struct Ensemble {
  int n;
  std::map<int, std::vector<std::pair<std::vector<int>, Rational>>> by_k;  // (m, weight)

  Ensemble(int n_, Weight a) : n(n_) {
    for (const auto& m : partitions_by_compositions(n_)) {
      const Rational w = weight(m, a);
      by_k[clusters(m)].emplace_back(m, w);
    }
  }

  Rational cnk(int k) const {
    Rational c = 0;
    if (auto it = by_k.find(k); it != by_k.end())
      for (const auto& [m, w] : it->second) c += w;
    return c;
  }

  // E[g(m) | K = k]
  template <class G>
  Rational expect(int k, G g) const {
    const Rational c = cnk(k);
    Rational s = 0;
    for (const auto& [m, w] : by_k.at(k)) s += w * g(m);
    return s / c;
  }
};

template <class Weight>
Ensemble<Weight> make_ensemble(int n, Weight a) {
  return Ensemble<Weight>(n, a);
}

// Brute-force rational birth-death ladder normalized.
inline std::vector<Rational> ladder(const std::vector<Rational>& s, const std::vector<Rational>& f, int n) {
  std::vector<Rational> pi(static_cast<std::size_t>(n), 0);
  pi[0] = 1;
  for (int k = 2; k <= n; ++k) pi[static_cast<std::size_t>(k - 1)] = pi[static_cast<std::size_t>(k - 2)] * s[k - 1] / f[k];
  Rational t = 0;
  for (auto& v : pi) t += v;
  for (auto& v : pi) v /= t;
  return pi;
}

inline double rel(double x, double ref) {
  if (ref == 0.0) return std::abs(x);
  return std::abs(x - ref) / std::abs(ref);
}

}  // namespace oracle

#endif  // CFP_TESTS_ORACLES_HPP
