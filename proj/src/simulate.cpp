#include "cfp/simulate.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <random>

#include "cfp/errors.hpp"

namespace cfp {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct Kahan {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  // [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }
  int below(int n) { return static_cast<int>(uniform() * n); }

 private:
  std::mt19937_64 eng_;
};

struct Rates {
  int n;
  std::vector<std::vector<double>> c, f;
  std::vector<double> d;

  Rates(const Kernel& kernel, int n_) : n(n_) {
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

void validate(const Kernel& kernel, const SimConfig& cfg) {
  if (cfg.n < 1) throw InvalidArgument("N must be >= 1");
  if (!(cfg.t_end > cfg.burn_in)) throw InvalidArgument("t_end must exceed burn_in");
  if (cfg.burn_in < 0.0) throw InvalidArgument("burn_in must be non-negative");
  if (cfg.replicas < 1) throw InvalidArgument("replicas must be >= 1");
  if (cfg.track_pair && cfg.n < 2) throw InvalidArgument("pair tracking needs N >= 2");
  if (cfg.initial == InitialCondition::given) {
    if (!cfg.given) throw InvalidArgument("initial condition 'given' needs a partition");
    if (cfg.given->n() != cfg.n) throw InvalidArgument("initial partition is not a partition of N");
    for (int i = 1; i <= cfg.n; ++i)
      if (cfg.given->m(i) > 0 && kernel.weight(i) == 0.0)
        throw InvalidArgument("initial partition holds a cluster of zero weight (size " + std::to_string(i) + ")");
  }
  kernel.require_defined(cfg.n);
}

SizePair key(int i, int j) { return i <= j ? SizePair{i, j} : SizePair{j, i}; }

// r-th cluster (0-based) of the given size, skipping index `skip`.
int nth_of_size(const std::vector<int>& sizes, int size, int r, int skip = -1) {
  for (int c = 0; c < static_cast<int>(sizes.size()); ++c) {
    if (c == skip || sizes[c] != size) continue;
    if (r-- == 0) return c;
  }
  throw NumericError("cluster bookkeeping out of sync");
}

}  // namespace

std::uint64_t replica_seed(std::uint64_t seed, int replica) {
  std::uint64_t state = seed;
  std::uint64_t out = 0;
  for (int r = 0; r <= replica; ++r) out = splitmix64(state);
  return out;
}

ReplicaStats run_replica(const Kernel& kernel, const SimConfig& cfg, int replica, EventLog* log) {
  validate(kernel, cfg);
  const int n = cfg.n;
  const Rates rates(kernel, n);
  Rng rng(replica_seed(cfg.seed, replica));

  std::vector<int> sizes;
  switch (cfg.initial) {
    case InitialCondition::singletons:
      sizes.assign(static_cast<std::size_t>(n), 1);
      break;
    case InitialCondition::single_cluster:
      sizes.assign(1, n);
      break;
    case InitialCondition::given:
      sizes = cfg.given->sizes().parts;
      break;
  }
  std::vector<int> counts(static_cast<std::size_t>(n) + 1, 0);
  for (int s : sizes) ++counts[s];

  // Marked particles A and B: uniform distinct particle positions.
  int ia = -1, ib = -1;
  if (cfg.track_pair) {
    const int pa = rng.below(n);
    int pb = rng.below(n - 1);
    if (pb >= pa) ++pb;
    int start = 0;
    for (int c = 0; c < static_cast<int>(sizes.size()); ++c) {
      if (pa >= start && pa < start + sizes[c]) ia = c;
      if (pb >= start && pb < start + sizes[c]) ib = c;
      start += sizes[c];
    }
  }

  ReplicaStats st;
  std::vector<Kahan> time_k(static_cast<std::size_t>(n) + 1), count_t(static_cast<std::size_t>(n) + 1);
  Kahan observed, cluster_t, together_t, together_d, apart_d;
  std::map<std::vector<int>, Kahan> config_t;

  bool ep_valid = false;
  double ep_start = 0.0;
  double t = 0.0;

  auto accumulate = [&](double from, double to) {
    const double lo = std::max(from, cfg.burn_in);
    const double hi = std::min(to, cfg.t_end);
    if (!(hi > lo)) return;
    const double w = hi - lo;
    const int k = static_cast<int>(sizes.size());
    observed.add(w);
    time_k[static_cast<std::size_t>(k)].add(w);
    cluster_t.add(k * w);
    for (int i = 1; i <= n; ++i)
      if (counts[i] > 0) count_t[static_cast<std::size_t>(i)].add(counts[i] * w);
    if (cfg.track_pair && ia == ib) together_t.add(w);
    if (cfg.track_configurations) config_t[std::vector<int>(counts.begin() + 1, counts.end())].add(w);
  };

  while (true) {
    double r_coag = 0.0, r_frag = 0.0;
    for (int i = 1; i <= n; ++i) {
      if (counts[i] == 0) continue;
      r_frag += rates.d[i] * counts[i];
      for (int j = i; i + j <= n; ++j) {
        const double pairs = i == j ? 0.5 * counts[i] * (counts[i] - 1) : static_cast<double>(counts[i]) * counts[j];
        if (pairs > 0.0) r_coag += rates.c[i][j] * pairs;
      }
    }
    const double total = r_coag + r_frag;
    if (!(total > 0.0)) {
      accumulate(t, cfg.t_end);
      st.absorbed = true;
      st.absorbed_at = t;
      break;
    }
    const double t_next = t + rng.exponential(total);
    accumulate(t, t_next);
    if (t_next >= cfg.t_end) break;
    t = t_next;
    ++st.events;
    const bool counted = t >= cfg.burn_in;
    const bool was_together = cfg.track_pair && ia == ib;

    double u = rng.uniform() * total;
    if (u < r_coag) {
      // Size pair (i, j), falling back to the last candidate on roundoff.
      int i = 0, j = 0;
      bool chosen = false;
      for (int a = 1; a <= n && !chosen; ++a) {
        if (counts[a] == 0) continue;
        for (int b = a; a + b <= n; ++b) {
          const double pairs = a == b ? 0.5 * counts[a] * (counts[a] - 1) : static_cast<double>(counts[a]) * counts[b];
          const double w = rates.c[a][b] * pairs;
          if (w <= 0.0) continue;
          i = a;
          j = b;
          if (u < w) {
            chosen = true;
            break;
          }
          u -= w;
        }
      }
      int c1 = nth_of_size(sizes, i, rng.below(counts[i]));
      int c2 = i == j ? nth_of_size(sizes, j, rng.below(counts[j] - 1), c1) : nth_of_size(sizes, j, rng.below(counts[j]));
      if (c2 < c1) std::swap(c1, c2);
      sizes[c1] += sizes[c2];
      const int last = static_cast<int>(sizes.size()) - 1;
      sizes[c2] = sizes[last];
      sizes.pop_back();
      for (int* lab : {&ia, &ib}) {
        if (*lab == c2) {
          *lab = c1;
        } else if (*lab == last) {
          *lab = c2;
        }
      }
      --counts[i];
      --counts[j];
      ++counts[i + j];
      if (counted) ++st.coagulations[key(i, j)];
      if (log) {
        if (log->events.size() < cfg.max_logged_events) log->events.push_back({t, true, i, j});
        else log->truncated = true;
      }
    } else {
      u -= r_coag;
      int s = 0;
      for (int cand = 2; cand <= n; ++cand) {
        const double w = rates.d[cand] * counts[cand];
        if (w <= 0.0) continue;
        s = cand;
        if (u < w) break;
        u -= w;
      }
      const int c = nth_of_size(sizes, s, rng.below(counts[s]));
      double v = rng.uniform() * rates.d[s];
      int split = 0;
      for (int i = 1; i < s; ++i) {
        if (rates.f[i][s - i] <= 0.0) continue;
        split = i;
        if (v < rates.f[i][s - i]) break;
        v -= rates.f[i][s - i];
      }
      sizes[c] = split;
      sizes.push_back(s - split);
      const int fresh = static_cast<int>(sizes.size()) - 1;
      int in_first = 0, placed = 0;
      for (int* lab : {&ia, &ib}) {
        if (*lab != c) continue;
        // Marked particles fill the s slots uniformly, one after the other.
        if (rng.uniform() * (s - placed) < (split - in_first)) {
          ++in_first;
        } else {
          *lab = fresh;
        }
        ++placed;
      }
      --counts[s];
      ++counts[split];
      ++counts[s - split];
      if (counted) ++st.fragmentations[key(split, s - split)];
      if (log) {
        if (log->events.size() < cfg.max_logged_events) log->events.push_back({t, false, split, s - split});
        else log->truncated = true;
      }
    }
#ifndef NDEBUG
    {
      long mass = 0;
      for (int s2 : sizes) mass += s2;
      assert(mass == n);
    }
#endif
    if (cfg.track_pair) {
      const bool together = ia == ib;
      if (together != was_together) {
        if (ep_valid && ep_start > cfg.burn_in) {
          if (was_together) {
            ++st.together_episodes;
            together_d.add(t - ep_start);
          } else {
            ++st.apart_episodes;
            apart_d.add(t - ep_start);
          }
        }
        ep_valid = true;
        ep_start = t;
      }
    }
  }

  st.observed_time = observed.sum;
  st.time_in_k.resize(static_cast<std::size_t>(n) + 1);
  st.count_time.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    st.time_in_k[static_cast<std::size_t>(i)] = time_k[static_cast<std::size_t>(i)].sum;
    st.count_time[static_cast<std::size_t>(i)] = count_t[static_cast<std::size_t>(i)].sum;
  }
  st.cluster_time = cluster_t.sum;
  st.together_time = together_t.sum;
  st.together_duration = together_d.sum;
  st.apart_duration = apart_d.sum;
  for (const auto& [m, k] : config_t) st.config_time.emplace(m, k.sum);
  return st;
}

Estimate ratio_estimate(const std::vector<double>& y, const std::vector<double>& x) {
  double Y = 0.0, X = 0.0;
  for (std::size_t r = 0; r < y.size(); ++r) {
    Y += y[r];
    X += x[r];
  }
  Estimate e;
  if (!(X > 0.0)) {
    e.value = std::numeric_limits<double>::quiet_NaN();
    e.se = e.value;
    return e;
  }
  e.value = Y / X;
  const auto R = static_cast<double>(y.size());
  if (y.size() < 2) {
    e.se = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  double ss = 0.0;
  for (std::size_t r = 0; r < y.size(); ++r) {
    const double dev = y[r] - e.value * x[r];
    ss += dev * dev;
  }
  e.se = std::sqrt(ss / (R * (R - 1.0))) / (X / R);
  return e;
}

namespace {

SimStats aggregate(const SimConfig& cfg, std::vector<ReplicaStats> reps) {
  SimStats s;
  s.config = cfg;
  s.replicas = std::move(reps);
  const int n = cfg.n;
  std::vector<double> obs;
  for (const auto& r : s.replicas) {
    obs.push_back(r.observed_time);
    if (r.absorbed) ++s.early_stops;
  }
  auto collect = [&](auto field) {
    std::vector<double> v;
    for (const auto& r : s.replicas) v.push_back(field(r));
    return v;
  };
  s.mean_clusters = ratio_estimate(collect([](const ReplicaStats& r) { return r.cluster_time; }), obs);
  for (int k = 1; k <= n; ++k)
    s.pi.push_back(ratio_estimate(collect([k](const ReplicaStats& r) { return r.time_in_k[k]; }), obs));
  for (int i = 1; i <= n; ++i)
    s.mean_counts.push_back(ratio_estimate(collect([i](const ReplicaStats& r) { return r.count_time[i]; }), obs));
  if (cfg.track_pair) s.p2 = ratio_estimate(collect([](const ReplicaStats& r) { return r.together_time; }), obs);
  return s;
}

void add_warnings(const Kernel& kernel, const SimConfig& cfg, SimStats& s) {
  if (cfg.n >= 2) {
    const auto report = verify_detailed_balance(kernel, cfg.n);
    if (report.offending_pair)
      s.warnings.push_back("kernel violates detailed balance at (" + std::to_string(report.offending_pair->first) + "," +
                           std::to_string(report.offending_pair->second) + ")");
  }
  if (s.early_stops > 0)
    s.warnings.push_back(std::to_string(s.early_stops) + " replica(s) reached a zero-propensity configuration");
}

}  // namespace

SimResult run_ssa(const Kernel& kernel, const SimConfig& config) {
  validate(kernel, config);
  std::vector<ReplicaStats> reps(static_cast<std::size_t>(config.replicas));
  SimResult out;
  if (config.record_events) out.log.emplace();
  EventLog* log0 = out.log ? &*out.log : nullptr;
  std::string failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (int r = 0; r < config.replicas; ++r) {
    try {
      reps[static_cast<std::size_t>(r)] = run_replica(kernel, config, r, r == 0 ? log0 : nullptr);
    } catch (const std::exception& e) {
#pragma omp critical(cfp_ssa_failure)
      if (failure.empty()) failure = e.what();
    }
  }
  if (!failure.empty()) throw NumericError("simulation replica failed: " + failure);
  out.stats = aggregate(config, std::move(reps));
  add_warnings(kernel, config, out.stats);
  return out;
}

SimResult run_ssa_serial(const Kernel& kernel, const SimConfig& config) {
  validate(kernel, config);
  std::vector<ReplicaStats> reps;
  SimResult out;
  if (config.record_events) out.log.emplace();
  for (int r = 0; r < config.replicas; ++r)
    reps.push_back(run_replica(kernel, config, r, r == 0 && out.log ? &*out.log : nullptr));
  out.stats = aggregate(config, std::move(reps));
  add_warnings(kernel, config, out.stats);
  return out;
}

Estimate SimStats::conditional_config_frequency(const OccupancyPartition& m) const {
  if (!config.track_configurations) throw InvalidArgument("configuration tracking was not enabled");
  std::vector<double> y, x;
  for (const auto& r : replicas) {
    const auto it = r.config_time.find(m.counts());
    y.push_back(it == r.config_time.end() ? 0.0 : it->second);
    x.push_back(r.time_in_k[static_cast<std::size_t>(m.clusters())]);
  }
  return ratio_estimate(y, x);
}

std::map<SizePair, long> SimStats::total_coagulations() const {
  std::map<SizePair, long> out;
  for (const auto& r : replicas)
    for (const auto& [k, v] : r.coagulations) out[k] += v;
  return out;
}

std::map<SizePair, long> SimStats::total_fragmentations() const {
  std::map<SizePair, long> out;
  for (const auto& r : replicas)
    for (const auto& [k, v] : r.fragmentations) out[k] += v;
  return out;
}

PairTimeEstimate estimate_pair_times(const SimStats& stats) {
  if (!stats.config.track_pair) throw InvalidArgument("pair tracking was not enabled");
  PairTimeEstimate e;
  std::vector<double> td, tc, ad, ac;
  for (const auto& r : stats.replicas) {
    td.push_back(r.together_duration);
    tc.push_back(static_cast<double>(r.together_episodes));
    ad.push_back(r.apart_duration);
    ac.push_back(static_cast<double>(r.apart_episodes));
    e.together_episodes += r.together_episodes;
    e.apart_episodes += r.apart_episodes;
  }
  if (e.together_episodes == 0 || e.apart_episodes == 0)
    throw InsufficientData("no completed together/apart episodes after burn-in");
  e.t_s = ratio_estimate(td, tc);
  e.t_r = ratio_estimate(ad, ac);
  e.p2 = stats.p2;
  e.episode_ratio = e.t_s.value / (e.t_s.value + e.t_r.value);
  e.reliable = e.together_episodes >= 100 && e.apart_episodes >= 100;
  return e;
}

}  // namespace cfp
