#include "cfp/pairtimes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <string>

#include "cfp/errors.hpp"
#include "cfp/exact.hpp"

namespace cfp {

std::string_view to_string(PairTarget t) { return t == PairTarget::separation ? "separation" : "reunion"; }

std::optional<std::size_t> PairChain::lookup(const PairState& s) const {
  const auto it = index.find({s.config.counts(), s.k1, s.k2});
  if (it == index.end()) return std::nullopt;
  return it->second;
}

int pair_chain_cap(PairTarget target) {
  if (const char* env = std::getenv("CFP_MAX_N")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return target == PairTarget::separation ? 20 : 14;
}

namespace {

// Memoized double-valued rates up to N.
struct RateCache {
  int n = 0;
  std::vector<std::vector<double>> c, f;
  std::vector<double> d;

  RateCache(const Kernel& kernel, int n_) : n(n_) {
    c.assign(static_cast<std::size_t>(n) + 1, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
    f = c;
    d.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 1; i <= n; ++i)
      for (int j = 1; i + j <= n; ++j) {
        c[i][j] = kernel.coag(i, j);
        f[i][j] = kernel.frag(i, j);
      }
    for (int k = 2; k <= n; ++k) d[k] = total_dissociation(kernel, k);
  }
};

std::vector<int> coagulate(std::vector<int> m, int i, int j) {
  --m[i - 1];
  --m[j - 1];
  ++m[i + j - 1];
  return m;
}

std::vector<int> fragment(std::vector<int> m, int k, int i) {
  --m[k - 1];
  ++m[i - 1];
  ++m[k - i - 1];
  return m;
}

long long pairs_of(const std::vector<int>& u, int i, int j) {
  if (i == j) return static_cast<long long>(u[i - 1]) * (u[i - 1] - 1) / 2;
  return static_cast<long long>(u[i - 1]) * u[j - 1];
}

// Stationary law over configurations with positive weight.
struct ConfigLaw {
  std::vector<OccupancyPartition> configs;
  std::vector<double> p;
  double p2 = 0.0;
};

ConfigLaw config_law(const Kernel& kernel, int n) {
  const auto sol = solve_exact<LogReal>(kernel, n);
  ConfigLaw law;
  law.p2 = sol.p2;
  const int cap = std::min(kernel.max_size().value_or(n), n);
  for_each_partition(n, cap, 0, [&](const OccupancyPartition& m) {
    if (!sol.table.reachable(m.clusters())) return;
    const LogReal w = configuration_weight(sol.table, m);
    if (w.is_zero()) return;
    const double pk = sol.pi[m.clusters()];
    if (pk <= 0.0) return;
    law.configs.push_back(m);
    law.p.push_back(pk * config_probability(sol.table, m));
  });
  return law;
}

// Unnormalized equilibrium weight of each marked placement, in units of
// 1 / (N (N - 1)).
template <class Visit>
void for_each_together(const OccupancyPartition& m, Visit visit) {
  for (int k = 2; k <= m.n(); ++k)
    if (m.m(k) > 0) visit(k, static_cast<double>(m.m(k)) * k * (k - 1));
}

template <class Visit>
void for_each_apart(const OccupancyPartition& m, Visit visit) {
  const int n = m.n();
  for (int k1 = 1; k1 <= n; ++k1) {
    if (m.m(k1) == 0) continue;
    if (m.m(k1) >= 2) visit(k1, k1, static_cast<double>(m.m(k1)) * (m.m(k1) - 1) * k1 * k1);
    for (int k2 = k1 + 1; k2 <= n; ++k2)
      if (m.m(k2) > 0) visit(k1, k2, 2.0 * m.m(k1) * k1 * m.m(k2) * k2);
  }
}

void check_size(int n, PairTarget target) {
  if (n < 2) throw InvalidArgument("pair chains need N >= 2");
  if (n > pair_chain_cap(target))
    throw ResourceError(std::string(to_string(target)) + " chain refused for N = " + std::to_string(n) + " (cap " +
                        std::to_string(pair_chain_cap(target)) + "; set CFP_MAX_N to override)");
}

}  // namespace

PairChain build_pair_chain(const Kernel& kernel, int n, PairTarget target) {
  check_size(n, target);
  kernel.require_defined(n);
  const auto law = config_law(kernel, n);
  const RateCache r(kernel, n);

  PairChain chain;
  chain.target = target;
  chain.n = n;
  for (const auto& m : law.configs) {
    if (target == PairTarget::separation) {
      for_each_together(m, [&](int k, double) { chain.states.push_back({m, k, 0}); });
    } else {
      for_each_apart(m, [&](int k1, int k2, double) { chain.states.push_back({m, k1, k2}); });
    }
  }
  if (chain.states.empty())
    throw StructuralError(std::string("no ") + (target == PairTarget::separation ? "together" : "apart") +
                          " states: the marked pair can never be in that status");
  for (std::size_t s = 0; s < chain.states.size(); ++s)
    chain.index.emplace(std::tuple{chain.states[s].config.counts(), chain.states[s].k1, chain.states[s].k2}, s);

  const std::size_t S = chain.states.size();
  chain.jump = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(S + 1), static_cast<Eigen::Index>(S + 1));
  chain.holding.assign(S, 0.0);
  chain.absorption_rate.assign(S, 0.0);
  chain.jump(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(S)) = 1.0;

  for (std::size_t s = 0; s < S; ++s) {
    const PairState& st = chain.states[s];
    const std::vector<int>& m = st.config.counts();
    std::vector<double> row(S + 1, 0.0);
    double absorb = 0.0;
    auto go = [&](std::vector<int> counts, int k1, int k2, double rate) {
      if (rate <= 0.0) return;
      if (k2 != 0 && k1 > k2) std::swap(k1, k2);
      const auto it = chain.index.find({counts, k1, k2});
      if (it == chain.index.end())
        throw StructuralError("transition leaves the state space from state " + std::to_string(s));
      row[it->second] += rate;
    };

    std::vector<int> u = m;
    --u[st.k1 - 1];
    if (target == PairTarget::reunion) --u[st.k2 - 1];

    auto unmarked_moves = [&](int k1, int k2) {
      for (int i = 1; i <= n; ++i) {
        if (u[i - 1] == 0) continue;
        for (int j = i; i + j <= n; ++j) {
          const long long pairs = pairs_of(u, i, j);
          if (pairs > 0) go(coagulate(m, i, j), k1, k2, r.c[i][j] * static_cast<double>(pairs));
        }
        for (int split = 1; split < i; ++split) go(fragment(m, i, split), k1, k2, r.f[split][i - split] * u[i - 1]);
      }
    };

    if (target == PairTarget::separation) {
      const int k = st.k1;
      for (int j = 1; k + j <= n; ++j)
        if (u[j - 1] > 0) go(coagulate(m, k, j), k + j, 0, r.c[k][j] * u[j - 1]);
      unmarked_moves(k, 0);
      const double kk = static_cast<double>(k) * (k - 1);
      for (int i = 1; i < k; ++i) {
        const double rate = r.f[i][k - i];
        if (rate <= 0.0) continue;
        const double first = i * (i - 1) / kk;
        const double second = (k - i) * (k - i - 1) / kk;
        if (first > 0.0) go(fragment(m, k, i), i, 0, rate * first);
        if (second > 0.0) go(fragment(m, k, i), k - i, 0, rate * second);
        absorb += rate * (1.0 - first - second);
      }
    } else {
      const int k1 = st.k1, k2 = st.k2;
      absorb += r.c[k1][k2] * (k1 + k2 <= n ? 1.0 : 0.0);
      for (int j = 1; k1 + j <= n; ++j)
        if (u[j - 1] > 0) go(coagulate(m, k1, j), k1 + j, k2, r.c[k1][j] * u[j - 1]);
      for (int j = 1; k2 + j <= n; ++j)
        if (u[j - 1] > 0) go(coagulate(m, k2, j), k1, k2 + j, r.c[k2][j] * u[j - 1]);
      unmarked_moves(k1, k2);
      for (const auto& [mine, other] : {std::pair{k1, k2}, std::pair{k2, k1}}) {
        for (int i = 1; i < mine; ++i) {
          const double rate = r.f[i][mine - i];
          if (rate <= 0.0) continue;
          go(fragment(m, mine, i), i, other, rate * i / mine);
          go(fragment(m, mine, i), mine - i, other, rate * (mine - i) / mine);
        }
      }
    }

    double total = absorb;
    for (double v : row) total += v;
    if (!(total > 0.0)) throw DegenerateChain("state " + std::to_string(s) + " has zero total outflow");
    chain.holding[s] = 1.0 / total;
    chain.absorption_rate[s] = absorb;
    for (std::size_t t = 0; t < S; ++t)
      chain.jump(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = row[t] / total;
    chain.jump(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(S)) = absorb / total;
  }
  return chain;
}

AbsorptionTimes mean_absorption_times(const PairChain& chain) {
  const auto S = static_cast<Eigen::Index>(chain.states.size());
  // Reverse reachability of the absorbing state.
  std::vector<bool> reaches(chain.states.size(), false);
  std::deque<Eigen::Index> queue;
  for (Eigen::Index s = 0; s < S; ++s)
    if (chain.jump(s, S) > 0.0) {
      reaches[static_cast<std::size_t>(s)] = true;
      queue.push_back(s);
    }
  while (!queue.empty()) {
    const Eigen::Index t = queue.front();
    queue.pop_front();
    for (Eigen::Index s = 0; s < S; ++s)
      if (!reaches[static_cast<std::size_t>(s)] && chain.jump(s, t) > 0.0) {
        reaches[static_cast<std::size_t>(s)] = true;
        queue.push_back(s);
      }
  }
  for (Eigen::Index s = 0; s < S; ++s)
    if (!reaches[static_cast<std::size_t>(s)]) {
      const auto& st = chain.states[static_cast<std::size_t>(s)];
      std::string desc;
      for (auto [size, count] : st.config.sparse()) desc += "[" + std::to_string(size) + "," + std::to_string(count) + "]";
      throw StructuralError("absorbing state unreachable from state " + std::to_string(s) + " (config " + desc +
                            ", marked " + std::to_string(st.k1) + "/" + std::to_string(st.k2) + ")");
    }

  const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(S, S) - chain.jump.topLeftCorner(S, S);
  const Eigen::VectorXd tau = Eigen::Map<const Eigen::VectorXd>(chain.holding.data(), S);
  const Eigen::VectorXd t = A.partialPivLu().solve(tau);
  AbsorptionTimes out;
  out.t.assign(t.data(), t.data() + S);
  out.residual = (A * t - tau).lpNorm<Eigen::Infinity>() / tau.lpNorm<Eigen::Infinity>();
  for (double v : out.t)
    if (!(v > 0.0) || !std::isfinite(v)) throw NumericError("absorption time solve produced a non-positive time");
  return out;
}

std::vector<double> start_distribution(const Kernel& kernel, const PairChain& chain, StartDistribution kind) {
  const int n = chain.n;
  const auto law = config_law(kernel, n);
  std::vector<double> w(chain.states.size(), 0.0);
  auto add = [&](std::vector<int> counts, int k1, int k2, double weight) {
    if (k2 != 0 && k1 > k2) std::swap(k1, k2);
    const auto it = chain.index.find({counts, k1, k2});
    if (it == chain.index.end()) throw StructuralError("start weight falls outside the chain's state space");
    w[it->second] += weight;
  };
  const RateCache r(kernel, n);
  for (std::size_t c = 0; c < law.configs.size(); ++c) {
    const auto& m = law.configs[c];
    const double p = law.p[c];
    if (kind == StartDistribution::equilibrium) {
      if (chain.target == PairTarget::separation) {
        for_each_together(m, [&](int k, double wt) { add(m.counts(), k, 0, p * wt); });
      } else {
        for_each_apart(m, [&](int k1, int k2, double wt) { add(m.counts(), k1, k2, p * wt); });
      }
    } else if (chain.target == PairTarget::separation) {
      // Episodes together begin when the two marked clusters merge.
      for_each_apart(m, [&](int k1, int k2, double wt) {
        if (k1 + k2 > n) return;
        const double rate = r.c[k1][k2];
        if (rate > 0.0) add(coagulate(m.counts(), k1, k2), k1 + k2, 0, p * wt * rate);
      });
    } else {
      // Episodes apart begin when a split separates the pair.
      for_each_together(m, [&](int k, double wt) {
        for (int i = 1; i < k; ++i) {
          const double rate = r.f[i][k - i] * 2.0 * i * (k - i) / (static_cast<double>(k) * (k - 1));
          if (rate > 0.0) add(fragment(m.counts(), k, i), i, k - i, p * wt * rate);
        }
      });
    }
  }
  double total = 0.0;
  for (double v : w) total += v;
  if (!(total > 0.0)) throw DegenerateChain("start distribution has no mass");
  for (double& v : w) v /= total;
  return w;
}

PairTimesReport pair_times(const Kernel& kernel, int n) {
  const auto sep = build_pair_chain(kernel, n, PairTarget::separation);
  const auto reu = build_pair_chain(kernel, n, PairTarget::reunion);
  const auto ts = mean_absorption_times(sep);
  const auto tr = mean_absorption_times(reu);
  auto average = [](const std::vector<double>& w, const std::vector<double>& t) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * t[i];
    return s;
  };
  PairTimesReport rep;
  rep.n = n;
  rep.t_s = average(start_distribution(kernel, sep, StartDistribution::entrance), ts.t);
  rep.t_r = average(start_distribution(kernel, reu, StartDistribution::entrance), tr.t);
  rep.t_s_equilibrium = average(start_distribution(kernel, sep, StartDistribution::equilibrium), ts.t);
  rep.t_r_equilibrium = average(start_distribution(kernel, reu, StartDistribution::equilibrium), tr.t);
  rep.p2_ratio = rep.t_s / (rep.t_s + rep.t_r);
  rep.p2_exact = solve_exact<LogReal>(kernel, n).p2;
  rep.max_residual = std::max(ts.residual, tr.residual);
  rep.separation_states = sep.states.size();
  rep.reunion_states = reu.states.size();
  return rep;
}

double stationarity_gap(const Kernel& kernel, int n) {
  if (n < 2) throw InvalidArgument("N must be >= 2");
  const auto law = config_law(kernel, n);
  std::vector<double> together(law.configs.size(), 0.0), apart(law.configs.size(), 0.0);
  double zt = 0.0, za = 0.0;
  for (std::size_t c = 0; c < law.configs.size(); ++c) {
    for_each_together(law.configs[c], [&](int, double w) { together[c] += law.p[c] * w; });
    for_each_apart(law.configs[c], [&](int, int, double w) { apart[c] += law.p[c] * w; });
    zt += together[c];
    za += apart[c];
  }
  double tv = 0.0;
  for (std::size_t c = 0; c < law.configs.size(); ++c) {
    const double mix = (zt > 0.0 ? law.p2 * together[c] / zt : 0.0) + (za > 0.0 ? (1.0 - law.p2) * apart[c] / za : 0.0);
    tv += std::abs(mix - law.p[c]);
  }
  return 0.5 * tv;
}

}  // namespace cfp
