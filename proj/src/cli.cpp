#include "cfp/cli.hpp"

#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "cfp/errors.hpp"
#include "cfp/exact.hpp"
#include "cfp/hypergeom.hpp"
#include "cfp/io.hpp"
#include "cfp/kernels.hpp"
#include "cfp/pairtimes.hpp"
#include "cfp/simulate.hpp"

namespace cfp::cli {

namespace {

using Row = std::vector<std::string>;

struct Options {
  std::string kernel;
  std::vector<std::string> a;
  std::vector<int> m;
  std::vector<std::string> n;
  std::string numeric = "float";
  std::string out;
  std::uint64_t seed = 1;
  bool json = false;
  bool csv = false;
  std::string quantity;
  std::string method = "exact";
  int index = 1;
  double sim_t = 0.0;
  double burn_in = -1.0;
  int replicas = 0;
  bool track_pair = false;
  std::string initial = "singletons";
  std::string events;
  bool limit = false;
};

struct GridPoint {
  int n = 0;
  std::string a_text;  // as given, "-" for tabulated kernels
  std::optional<int> m;
  KernelSpec spec;
};

struct RunManifest {
  std::string subcommand;
  KernelSpec base;
  std::string kernel_source;
  std::vector<int> n;
  std::vector<std::string> a;
  std::vector<int> m;
  NumericMode numeric = NumericMode::floating;
  bool json = false;
  std::string out;
  std::vector<std::pair<std::string, std::string>> fields;  // hashed, in order

  std::uint64_t hash() const {
    std::string s;
    for (const auto& [k, v] : fields) s += k + "=" + v + ";";
    return fnv1a64(s);
  }

  std::vector<GridPoint> grid() const {
    std::vector<GridPoint> g;
    for (int n_val : n)
      for (const auto& a_text : a) {
        std::vector<std::optional<int>> ms;
        if (m.empty()) ms.emplace_back(base.max_size);
        for (int mv : m) ms.emplace_back(mv);
        for (const auto& mv : ms) {
          GridPoint p{n_val, a_text, mv, base};
          if (base.family != KernelFamily::tabulated && a_text != "-") p.spec.a = parse_rational(a_text);
          if (base.family == KernelFamily::bounded) p.spec.max_size = mv;
          g.push_back(std::move(p));
        }
      }
    return g;
  }
};

template <class T>
std::string fmt(const T& v) {
  if constexpr (std::is_same_v<T, Rational>) {
    return to_string(v);
  } else {
    return format_double(static_cast<double>(v));
  }
}

std::string join(const Row& row) {
  std::string s;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) s += ',';
    s += row[i];
  }
  return s;
}

std::string m_text(const GridPoint& p) { return p.m ? std::to_string(*p.m) : "-"; }

std::string config_text(const OccupancyPartition& m) {
  std::string s;
  for (int part : m.sizes().parts) {
    if (!s.empty()) s += ' ';
    s += std::to_string(part);
  }
  return s;
}

std::vector<int> parse_n_list(const std::vector<std::string>& items) {
  std::vector<int> out;
  for (const auto& item : items) {
    std::vector<long> f;
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ':')) {
      try {
        std::size_t used = 0;
        f.push_back(std::stol(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::logic_error&) {
        throw InvalidArgument("bad --n entry '" + item + "'");
      }
    }
    if (f.size() == 1) {
      out.push_back(static_cast<int>(f[0]));
    } else if (f.size() == 2 || f.size() == 3) {
      const long step = f.size() == 3 ? f[2] : 1;
      if (step <= 0 || f[1] < f[0]) throw InvalidArgument("bad --n range '" + item + "'");
      for (long v = f[0]; v <= f[1]; v += step) out.push_back(static_cast<int>(v));
    } else {
      throw InvalidArgument("bad --n entry '" + item + "'");
    }
  }
  for (int v : out)
    if (v < 1) throw InvalidArgument("N must be >= 1");
  return out;
}

// ---- subcommand defaults ----------------------------------------------------

struct EmitPreset {
  std::string kernel;
  std::vector<std::string> n;
  std::vector<std::string> a;
  std::vector<int> m;
};

std::vector<std::string> log_grid(int lo_quarter, int hi_quarter) {
  std::vector<std::string> g;
  for (int e = lo_quarter; e <= hi_quarter; ++e) g.push_back(format_double(std::pow(10.0, e / 4.0)));
  return g;
}

EmitPreset emit_preset(const std::string& q) {
  if (q == "g1-error") return {"constant", {"2:1000"}, {"1", "10", "100", "1000"}, {}};
  if (q == "mean-counts") return {"constant", {"5"}, {"0.05", "0.5", "5"}, {}};
  if (q == "pi-k") return {"bounded", {"9"}, {"1e-5", "0.5", "10"}, {4, 9}};
  if (q == "p2-vs-a") return {"bounded", {"9"}, log_grid(-20, 12), {4, 9}};
  throw InvalidArgument("unknown emit quantity '" + q + "' (g1-error, mean-counts, pi-k, p2-vs-a)");
}

RunManifest make_manifest(const std::string& sub, Options& o) {
  RunManifest r;
  r.subcommand = sub;
  if (sub == "emit") {
    const auto preset = emit_preset(o.quantity);
    if (o.kernel.empty()) o.kernel = preset.kernel;
    if (o.n.empty()) o.n = preset.n;
    if (o.a.empty()) o.a = preset.a;
    if (o.m.empty() && o.kernel == "bounded") o.m = preset.m;
  }
  if (o.kernel.empty()) o.kernel = "constant";
  if (o.n.empty()) throw InvalidArgument("--n is required");
  if (o.numeric != "float" && o.numeric != "rational") throw InvalidArgument("--numeric must be rational or float");
  if (o.json && o.csv) throw InvalidArgument("--json and --csv are exclusive");
  r.numeric = o.numeric == "rational" ? NumericMode::exact : NumericMode::floating;
  r.json = o.json;
  r.out = o.out;
  r.n = parse_n_list(o.n);

  if (o.kernel == "constant" || o.kernel == "bounded" || o.kernel == "linear") {
    r.base.family = parse_kernel_family(o.kernel);
    r.kernel_source = o.kernel;
  } else {
    r.base = load_kernel_spec(o.kernel);
    r.kernel_source = "file";
  }
  if (r.base.family == KernelFamily::tabulated) {
    if (!o.a.empty() || !o.m.empty()) throw InvalidArgument("--a and --m do not apply to tabulated kernels");
    r.a = {"-"};
  } else {
    r.a = o.a.empty() ? std::vector<std::string>{r.kernel_source == "file" ? to_string(r.base.a) : "1"} : o.a;
    for (const auto& a : r.a)
      if (parse_rational(a) <= 0) throw InvalidArgument("--a values must be positive");
  }
  if (!o.m.empty() && r.base.family != KernelFamily::bounded) throw InvalidArgument("--m applies to bounded kernels");
  r.m = o.m;
  if (r.base.family == KernelFamily::bounded && r.m.empty() && !r.base.max_size)
    throw InvalidArgument("bounded kernel requires --m");
  for (int mv : r.m)
    if (mv < 1) throw InvalidArgument("--m values must be >= 1");

  if (sub == "simulate" || sub == "compare") {
    if (o.sim_t <= 0) o.sim_t = 1e4;
    if (o.burn_in < 0) o.burn_in = 0.01 * o.sim_t;
    if (o.burn_in >= o.sim_t) throw InvalidArgument("--burn-in must be shorter than --sim-t");
    if (o.replicas <= 0) o.replicas = 16;
  }

  auto& f = r.fields;
  f.emplace_back("subcommand", sub);
  f.emplace_back("kernel", r.kernel_source == "file" ? kernel_spec_to_json(r.base).dump() : r.kernel_source);
  std::string ns, as, ms;
  for (int v : r.n) ns += (ns.empty() ? "" : " ") + std::to_string(v);
  for (const auto& v : r.a) as += (as.empty() ? "" : " ") + v;
  for (int v : r.m) ms += (ms.empty() ? "" : " ") + std::to_string(v);
  f.emplace_back("N", ns);
  f.emplace_back("a", as);
  f.emplace_back("M", ms.empty() ? "-" : ms);
  f.emplace_back("numeric", o.numeric);
  f.emplace_back("format", o.json ? "json" : "csv");
  if (!o.quantity.empty()) f.emplace_back("quantity", o.quantity);
  if (sub == "analytic") {
    f.emplace_back("method", o.method);
    f.emplace_back("index", std::to_string(o.index));
  }
  if (sub == "exact" && o.limit) f.emplace_back("limit", "a->0");
  if (sub == "simulate" || sub == "compare") {
    f.emplace_back("seed", std::to_string(o.seed));
    f.emplace_back("rng", kRngAlgorithm);
    f.emplace_back("sim_t", format_double(o.sim_t));
    f.emplace_back("burn_in", format_double(o.burn_in));
    f.emplace_back("replicas", std::to_string(o.replicas));
    f.emplace_back("initial", o.initial);
    if (sub == "simulate") f.emplace_back("track_pair", o.track_pair ? "1" : "0");
  }
  return r;
}

// ---- per-point work -----------------------------------------------------------

struct PointOutput {
  std::vector<Row> rows;
  Json json;
  int misses = 0;
  int unresolved = 0;
  int passes = 0;
  std::string event_csv;
};

Row grid_cells(const GridPoint& p) { return {std::to_string(p.n), p.a_text, m_text(p)}; }

// Long-format rows {quantity, index, value} for the exact quantities.
template <class T>
std::vector<Row> exact_quantity(const Kernel& kernel, int n, const std::string& q) {
  std::vector<Row> rows;
  if (q == "g1") {
    if (kernel.family() != KernelFamily::constant) throw InvalidArgument("g1 is defined for the constant kernel");
    if constexpr (std::is_same_v<T, Rational>) {
      rows.push_back({"g1", "", fmt(g_n_exact(1, kernel.a(), n))});
    } else {
      rows.push_back({"g1", "", fmt(g_n(1, to_double(kernel.a()), n).value)});
    }
    return rows;
  }
  if (q == "pairtimes") {
    const auto r = pair_times(kernel, n);
    rows.push_back({"t_s", "", fmt(r.t_s)});
    rows.push_back({"t_r", "", fmt(r.t_r)});
    rows.push_back({"p2_ratio", "", fmt(r.p2_ratio)});
    return rows;
  }
  if (q == "cnk") {
    const auto table = compute_cnk<T>(kernel, n);
    for (int k = 1; k <= n; ++k) {
      if constexpr (std::is_same_v<T, Rational>) {
        rows.push_back({"cnk", std::to_string(k), fmt(table(n, k))});
      } else {
        rows.push_back({"log_cnk", std::to_string(k), fmt(table(n, k).log())});
      }
    }
    return rows;
  }
  const auto sol = solve_exact<T>(kernel, n);
  if (q == "pi-k") {
    for (int k = 1; k <= n; ++k) rows.push_back({"pi", std::to_string(k), fmt(sol.pi[k])});
  } else if (q == "mean-counts") {
    for (int i = 1; i <= n; ++i) rows.push_back({"mean_count", std::to_string(i), fmt(sol.moments.mean(i))});
  } else if (q == "second-moments") {
    for (int i = 1; i <= n; ++i) rows.push_back({"second_moment", std::to_string(i), fmt(sol.moments.second_moments[i - 1])});
  } else if (q == "p2") {
    rows.push_back({"p2", "", fmt(sol.p2)});
  } else if (q == "mean-clusters") {
    prob_t<T> mu{};
    for (int k = 1; k <= n; ++k) mu += prob_t<T>(k) * sol.pi[k];
    rows.push_back({"mean_clusters", "", fmt(mu)});
  } else if (q == "rates") {
    for (int k = 1; k < n; ++k) rows.push_back({"s", std::to_string(k), fmt(sol.rates.sep(k))});
    for (int k = 2; k <= n; ++k) rows.push_back({"f", std::to_string(k), fmt(sol.rates.form(k))});
  } else {
    throw InvalidArgument("unknown quantity '" + q + "'");
  }
  return rows;
}

template <class T>
Json exact_json(const Kernel& kernel, int n) {
  const auto sol = solve_exact<T>(kernel, n);
  Json j;
  Json pi = Json::array(), s = Json::array(), f = Json::array();
  for (int k = 1; k <= n; ++k) pi.push_back(number_json(sol.pi[k]));
  for (int k = 1; k <= n; ++k) {
    s.push_back(number_json(sol.rates.sep(k)));
    f.push_back(number_json(sol.rates.form(k)));
  }
  j["pi"] = pi;
  j["moments"] = moment_report_to_json(sol.moments);
  j["p2"] = number_json(sol.p2);
  j["s"] = s;
  j["f"] = f;
  j["cnk"] = cnk_table_to_json(sol.table);
  return j;
}

void exact_point(const RunManifest& r, const Options& o, const GridPoint& p, PointOutput& po) {
  const Kernel kernel(p.spec);
  kernel.require_defined(p.n);
  if (o.limit) {
    const auto lim = nucleation_limit(kernel, p.n);
    Json cfg = Json::array();
    for (const auto& [m, prob] : lim.configurations) {
      po.rows.push_back({"probability", config_text(m), to_string(prob)});
      cfg.push_back({{"configuration", partition_to_json(m)}, {"probability", to_string(prob)}});
    }
    po.rows.push_back({"p2", "", to_string(lim.p2)});
    po.json = {{"K", lim.k}, {"configurations", cfg}, {"p2", to_string(lim.p2)}};
    return;
  }
  const std::string q = o.quantity.empty() ? "pi-k" : o.quantity;
  if (r.numeric == NumericMode::exact) {
    po.rows = exact_quantity<Rational>(kernel, p.n, q);
    if (r.json) po.json = exact_json<Rational>(kernel, p.n);
  } else {
    po.rows = exact_quantity<LogReal>(kernel, p.n, q);
    if (r.json) po.json = exact_json<LogReal>(kernel, p.n);
  }
}

void analytic_point(const RunManifest& r, const Options& o, const GridPoint& p, PointOutput& po) {
  if (p.spec.family != KernelFamily::constant) throw InvalidArgument("analytic forms need the constant kernel");
  const int N = p.n;
  const GMethod method = parse_g_method(o.method);
  const std::string q = o.quantity.empty() ? "g" : o.quantity;
  const bool exact = r.numeric == NumericMode::exact;
  const Rational a = p.spec.a;
  const double ad = to_double(a);
  const std::string mname(to_string(method));
  auto add = [&](const std::string& quantity, const std::string& index, const std::string& value,
                 const std::string& how) { po.rows.push_back({quantity, index, how, value}); };
  if (exact && method != GMethod::exact && q != "g")
    throw InvalidArgument("rational mode supports the exact method only");
  if (q == "g") {
    if (exact && method == GMethod::exact) {
      add("g", std::to_string(o.index), to_string(g_n_exact(o.index, a, N)), mname);
    } else if (exact && method == GMethod::continued_fraction) {
      // Bottom-up evaluation in rationals equals the exact G_1.
      if (o.index != 1) throw InvalidArgument("the continued fraction is defined for G_1 only");
      Rational v = 1;
      for (int k = 2 * N - 3; k >= 1; --k) v = 1 + continued_fraction_coefficient(k, N) * a / v;
      add("g", "1", to_string(Rational(1) / v), mname);
    } else if (exact) {
      throw InvalidArgument("rational mode supports the exact and continued_fraction methods for g");
    } else {
      add("g", std::to_string(o.index), fmt(g_n(o.index, ad, N, method).value), mname);
    }
  } else if (q == "mu") {
    if (method == GMethod::asymptotic) {
      if (o.index != 1) throw InvalidArgument("the asymptotic form covers mu_1 only");
      add("mu", "1", fmt(mu1_asymptotic(ad, N)), mname);
    } else if (method != GMethod::exact) {
      throw InvalidArgument("mu supports the exact and asymptotic methods");
    } else {
      add("mu", std::to_string(o.index), exact ? to_string(mu_n_exact(o.index, a, N)) : fmt(mu_n(o.index, ad, N)), mname);
    }
  } else if (q == "variance") {
    if (method != GMethod::exact) throw InvalidArgument("variance supports the exact method only");
    if (exact) {
      const Rational m1 = mu_n_exact(1, a, N);
      add("variance", "", to_string(mu_n_exact(2, a, N) - m1 * m1), mname);
    } else {
      add("variance", "", fmt(variance_constant(ad, N)), mname);
    }
  } else if (q == "mean-counts") {
    if (method != GMethod::exact) throw InvalidArgument("mean-counts supports the exact method only");
    for (int i = 1; i <= N; ++i)
      add("mean_count", std::to_string(i),
          exact ? to_string(mean_counts_constant_exact(i, a, N)) : fmt(mean_counts_constant(i, ad, N)), mname);
  } else if (q == "p2") {
    if (method != GMethod::exact && method != GMethod::asymptotic)
      throw InvalidArgument("p2 supports the exact and asymptotic methods");
    if (exact)
      add("p2", "", to_string(g_n_exact(1, a, N)), mname);
    else
      add("p2", "", fmt(p2_constant(ad, N, method == GMethod::asymptotic)), mname);
  } else if (q == "pi-k") {
    if (method != GMethod::exact) throw InvalidArgument("pi-k supports the exact method only");
    if (exact) {
      const auto pi = pi_constant(N, a);
      for (int k = 1; k <= N; ++k) add("pi", std::to_string(k), to_string(pi[k]), mname);
    } else {
      const auto pi = pi_constant(N, ad);
      for (int k = 1; k <= N; ++k) add("pi", std::to_string(k), fmt(pi[k]), mname);
    }
  } else {
    throw InvalidArgument("unknown analytic quantity '" + q + "' (g, mu, variance, mean-counts, p2, pi-k)");
  }
}

void pairtimes_point(const RunManifest&, const Options&, const GridPoint& p, PointOutput& po) {
  const Kernel kernel(p.spec);
  kernel.require_defined(p.n);
  const auto rep = pair_times(kernel, p.n);
  po.rows.push_back({fmt(rep.t_s), fmt(rep.t_r), fmt(rep.p2_ratio), fmt(rep.p2_exact), fmt(rep.max_residual)});
  po.json = pair_times_to_json(rep);
}

SimConfig sim_config(const Options& o, const GridPoint& p) {
  SimConfig c;
  c.n = p.n;
  c.t_end = o.sim_t;
  c.burn_in = o.burn_in;
  c.seed = o.seed;
  c.replicas = o.replicas;
  if (o.initial == "singletons") {
    c.initial = InitialCondition::singletons;
  } else if (o.initial == "single-cluster") {
    c.initial = InitialCondition::single_cluster;
  } else {
    throw InvalidArgument("--initial must be singletons or single-cluster");
  }
  return c;
}

std::string estimate_cell(double v) { return std::isfinite(v) ? format_double(v) : "nan"; }

void simulate_point(const RunManifest&, const Options& o, const GridPoint& p, PointOutput& po) {
  const Kernel kernel(p.spec);
  kernel.require_defined(p.n);
  SimConfig c = sim_config(o, p);
  c.track_pair = o.track_pair && p.n >= 2;
  c.record_events = !o.events.empty();
  const auto res = run_ssa(kernel, c);
  const auto& s = res.stats;
  auto add = [&](const std::string& q, const std::string& idx, const Estimate& e) {
    po.rows.push_back({q, idx, estimate_cell(e.value), estimate_cell(e.se)});
  };
  for (int k = 1; k <= p.n; ++k) add("pi", std::to_string(k), s.pi[k - 1]);
  for (int i = 1; i <= p.n; ++i) add("mean_count", std::to_string(i), s.mean_counts[i - 1]);
  add("mean_clusters", "", s.mean_clusters);
  if (c.track_pair) {
    add("p2", "", s.p2);
    try {
      const auto pt = estimate_pair_times(s);
      add("t_s", "", pt.t_s);
      add("t_r", "", pt.t_r);
    } catch (const InsufficientData&) {
    }
  }
  po.json = sim_stats_to_json(s);
  if (res.log) po.event_csv = event_log_to_csv(*res.log);
}

// Expected number of events observed while the quantity is non-zero.
constexpr double kMinVisits = 30.0;


void compare_point(const RunManifest&, const Options& o, const GridPoint& p, PointOutput& po) {
  const Kernel kernel(p.spec);
  kernel.require_defined(p.n);
  const int n = p.n;
  const auto sol = solve_exact<LogReal>(kernel, n);
  SimConfig c = sim_config(o, p);
  c.track_pair = n >= 2;
  c.track_configurations = n <= 16;
  const auto res = run_ssa(kernel, c);
  const auto& s = res.stats;
  double observed = 0.0;
  for (const auto& r : s.replicas) observed += r.observed_time;
  auto level_rate = [&](int k) { return sol.rates.form(k) + (k < n ? sol.rates.sep(k) : 0.0); };
  double mean_rate = 0.0;
  for (int k = 1; k <= n; ++k) mean_rate += sol.pi[k] * level_rate(k);

  Json items = Json::array();
  auto add = [&](const std::string& q, const std::string& idx, double exact, const Estimate& e, bool resolved) {
    const auto sc = score_estimate(exact, e.value, e.se, resolved);
    po.rows.push_back({q, idx, format_double(exact), estimate_cell(e.value), estimate_cell(e.se),
                       std::isfinite(sc.z) ? format_double(sc.z) : "", sc.status});
    if (sc.status == "miss") ++po.misses;
    else if (sc.status == "unresolved") ++po.unresolved;
    else ++po.passes;
    items.push_back({{"quantity", q}, {"index", idx}, {"exact", exact}, {"estimate", estimate_cell(e.value)},
                     {"se", estimate_cell(e.se)}, {"status", sc.status}});
  };

  for (int k = 1; k <= n; ++k)
    add("pi", std::to_string(k), sol.pi[k], s.pi[k - 1], sol.pi[k] * observed * level_rate(k) >= kMinVisits);
  for (int i = 1; i <= n; ++i) {
    const double m = sol.moments.mean(i);
    add("mean_count", std::to_string(i), m, s.mean_counts[i - 1], m * observed * mean_rate >= kMinVisits);
  }
  double mu = 0.0;
  for (int k = 1; k <= n; ++k) mu += k * sol.pi[k];
  add("mean_clusters", "", mu, s.mean_clusters, true);
  if (n >= 2) add("p2", "", sol.p2, s.p2, true);
  if (n >= 2 && n <= pair_chain_cap(PairTarget::reunion)) {
    const auto exact_pt = pair_times(kernel, n);
    try {
      const auto pt = estimate_pair_times(s);
      add("t_s", "", exact_pt.t_s, pt.t_s, pt.reliable);
      add("t_r", "", exact_pt.t_r, pt.t_r, pt.reliable);
    } catch (const InsufficientData&) {
      add("t_s", "", exact_pt.t_s, {NAN, NAN}, false);
      add("t_r", "", exact_pt.t_r, {NAN, NAN}, false);
    }
  }
  if (c.track_configurations) {
    const auto index = enumerate_occupancy(n);
    for (const auto& m : index) {
      const int k = m.clusters();
      if (!sol.table.reachable(k)) continue;
      const double exact = config_probability(sol.table, m);
      const bool resolved = sol.pi[k] * exact * observed * level_rate(k) >= kMinVisits;
      add("config", config_text(m), exact, s.conditional_config_frequency(m), resolved);
    }
  }
  po.json = {{"items", items},
             {"passes", po.passes},
             {"misses", po.misses},
             {"unresolved", po.unresolved},
             {"simulation", sim_stats_to_json(s)}};
}

void emit_point(const RunManifest& r, const Options& o, const GridPoint& p, PointOutput& po) {
  const Kernel kernel(p.spec);
  kernel.require_defined(p.n);
  const std::string& q = o.quantity;
  const bool exact = r.numeric == NumericMode::exact;
  if (q == "g1-error") {
    if (kernel.family() != KernelFamily::constant) throw InvalidArgument("g1-error needs the constant kernel");
    if (p.n < 2) throw InvalidArgument("g1-error needs N >= 2");
    const double a = to_double(kernel.a());
    const double g = g_n(1, a, p.n).value;
    const double gt = g_n(1, a, p.n, GMethod::asymptotic).value;
    po.rows.push_back({p.a_text, std::to_string(p.n), fmt(g), fmt(gt), fmt(g - gt), fmt(std::abs(g - gt) / g)});
    return;
  }
  std::vector<Row> rows;
  const std::string base = q == "p2-vs-a" ? "p2" : q;
  rows = exact ? exact_quantity<Rational>(kernel, p.n, base) : exact_quantity<LogReal>(kernel, p.n, base);
  for (const auto& row : rows) {
    Row out = grid_cells(p);
    if (q != "p2-vs-a") out.push_back(row[1]);
    out.push_back(row[2]);
    po.rows.push_back(std::move(out));
  }
}

Row header_for(const std::string& sub, const Options& o, bool single) {
  if (sub == "exact") {
    if (o.limit) return {"N", "a", "M", "quantity", "configuration", "value"};
    if (single && (o.quantity.empty() || o.quantity == "pi-k")) return {"K", "pi"};
    return {"N", "a", "M", "quantity", "index", "value"};
  }
  if (sub == "sweep") return {"N", "a", "M", "quantity", "index", "value"};
  if (sub == "analytic") return {"N", "a", "quantity", "index", "method", "value"};
  if (sub == "pairtimes") return {"N", "a", "M", "t_s", "t_r", "p2_ratio", "p2_exact", "max_residual"};
  if (sub == "simulate") return {"N", "a", "M", "quantity", "index", "estimate", "se"};
  if (sub == "compare") return {"N", "a", "M", "quantity", "index", "exact", "estimate", "se", "z", "status"};
  if (o.quantity == "g1-error") return {"a", "N", "G1", "G1_asymptotic", "signed_error", "relative_error"};
  if (o.quantity == "mean-counts") return {"N", "a", "M", "i", "mean_count"};
  if (o.quantity == "pi-k") return {"N", "a", "M", "K", "pi"};
  return {"N", "a", "M", "p2"};
}

using PointFn = std::function<void(const RunManifest&, const Options&, const GridPoint&, PointOutput&)>;

PointFn point_fn(const std::string& sub) {
  if (sub == "exact" || sub == "sweep") return exact_point;
  if (sub == "analytic") return analytic_point;
  if (sub == "pairtimes") return pairtimes_point;
  if (sub == "simulate") return simulate_point;
  if (sub == "compare") return compare_point;
  return emit_point;
}

void check_writable(const std::string& path) {
  if (path.empty()) return;
  const bool existed = std::filesystem::exists(path);
  std::ofstream f(path, std::ios::app);
  if (!f) throw InvalidArgument("cannot write output '" + path + "'");
  f.close();
  if (!existed) std::filesystem::remove(path);
}

std::string metadata_lines(const RunManifest& r) {
  std::string s = "# cfp " + r.subcommand + "\n# manifest " + hex64(r.hash()) + "\n";
  for (const auto& [k, v] : r.fields)
    if (k != "subcommand") s += "# " + k + " " + v + "\n";
  return s;
}

Json metadata_json(const RunManifest& r) {
  Json m;
  m["manifest"] = hex64(r.hash());
  for (const auto& [k, v] : r.fields) m[k] = v;
  m["kernel_hash"] = hex64(fnv1a64(kernel_spec_to_json(r.base).dump()));
  return m;
}

int execute(const std::string& sub, Options o, std::ostream& out, std::ostream& err) {
  if (sub == "sweep" && o.quantity.empty()) throw InvalidArgument("sweep requires --quantity");
  if (sub == "emit" && o.quantity.empty()) throw InvalidArgument("emit requires --quantity");
  if (sub == "emit" && o.json) throw InvalidArgument("emit writes CSV only");
  if (sub == "pairtimes" || sub == "simulate" || sub == "compare" || (sub == "emit" && o.quantity == "g1-error")) {
    if (o.numeric == "rational") throw InvalidArgument(sub + " computes in floating point only");
  }
  if (o.limit && sub != "exact") throw InvalidArgument("--limit applies to exact");
  const RunManifest r = make_manifest(sub, o);
  const auto grid = r.grid();
  if (grid.empty()) throw InvalidArgument("empty parameter grid");
  if (!o.events.empty() && grid.size() != 1) throw InvalidArgument("--events needs a single grid point");
  check_writable(r.out);
  check_writable(o.events);

  const auto fn = point_fn(sub);
  std::vector<PointOutput> results(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      fn(r, o, grid[i], results[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::string text;
  int misses = 0, unresolved = 0, passes = 0;
  for (const auto& po : results) {
    misses += po.misses;
    unresolved += po.unresolved;
    passes += po.passes;
  }
  const bool single = grid.size() == 1;
  if (r.json) {
    Json doc;
    doc["metadata"] = metadata_json(r);
    Json list = Json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      Json entry;
      entry["N"] = grid[i].n;
      entry["a"] = grid[i].a_text;
      entry["M"] = grid[i].m ? Json(*grid[i].m) : Json(nullptr);
      if (results[i].json.is_null()) {
        Json rows = Json::array();
        for (const auto& row : results[i].rows) rows.push_back(row);
        entry["rows"] = rows;
      } else {
        entry["result"] = results[i].json;
      }
      list.push_back(entry);
    }
    doc["results"] = list;
    if (sub == "compare") doc["summary"] = {{"passes", passes}, {"misses", misses}, {"unresolved", unresolved}};
    text = doc.dump(2) + "\n";
  } else {
    text = metadata_lines(r);
    text += join(header_for(sub, o, single)) + "\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (const auto& row : results[i].rows) {
        Row full;
        const bool bare = sub == "exact" && single && !o.limit && (o.quantity.empty() || o.quantity == "pi-k");
        if (bare) {
          full = {row[1], row[2]};
        } else if (sub == "emit") {
          full = row;
        } else if (sub == "analytic") {
          full = {std::to_string(grid[i].n), grid[i].a_text};
          full.insert(full.end(), row.begin(), row.end());
        } else {
          full = grid_cells(grid[i]);
          full.insert(full.end(), row.begin(), row.end());
        }
        text += join(full) + "\n";
      }
  }

  std::ostream& summary = r.out.empty() ? err : out;
  if (r.out.empty()) {
    out << text;
  } else {
    std::ofstream f(r.out, std::ios::binary | std::ios::trunc);
    f << text;
    if (!f) throw InvalidArgument("cannot write output '" + r.out + "'");
  }
  if (!o.events.empty()) {
    std::ofstream f(o.events, std::ios::binary | std::ios::trunc);
    f << metadata_lines(r) << results[0].event_csv;
    if (!f) throw InvalidArgument("cannot write output '" + o.events + "'");
  }
  summary << sub << ": " << grid.size() << " grid point" << (single ? "" : "s") << ", manifest " << hex64(r.hash());
  if (!r.out.empty()) summary << ", wrote " << r.out;
  summary << "\n";
  if (sub == "compare") {
    summary << "compare: " << passes << " pass, " << misses << " miss (>3 se), " << unresolved
            << " below resolution\n";
    if (misses > 0) return compare_miss;
  }
  return ok;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--kernel", o.kernel, "constant, bounded, linear, or a kernel spec JSON file");
  sub->add_option("--a", o.a, "parameter a (comma-separated list; rationals like 1/3 accepted)")->delimiter(',');
  sub->add_option("--m", o.m, "maximal cluster size M for the bounded kernel (list)")->delimiter(',');
  sub->add_option("--n", o.n, "number of particles N (list; lo:hi[:step] ranges)")->delimiter(',');
  sub->add_option("--numeric", o.numeric, "rational or float")->capture_default_str();
  sub->add_option("--out", o.out, "output file (default: stdout)");
  sub->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  auto* j = sub->add_flag("--json", o.json, "JSON output");
  auto* c = sub->add_flag("--csv", o.csv, "CSV output (default)");
  j->excludes(c);
}

}  // namespace

Score score_estimate(double exact, double value, double se, bool resolved) {
  if (!std::isfinite(value)) return {NAN, "unresolved"};
  const double diff = std::abs(value - exact);
  if (exact == 0.0) return {NAN, diff == 0.0 ? "pass" : "miss"};
  if (!resolved || !std::isfinite(se)) return {NAN, "unresolved"};
  if (se == 0.0) return {NAN, diff <= 1e-12 * std::max(1.0, std::abs(exact)) ? "pass" : "miss"};
  const double z = diff / se;
  return {z, z <= 3.0 ? "pass" : "miss"};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact and simulated statistics of finite coagulation-fragmentation systems", "cfp"};
  app.require_subcommand(1);
  Options o;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {{"exact", "exact steady state: Pi_K, moments, P2, C_{N,K}"},
                      {"analytic", "constant-kernel hypergeometric forms"},
                      {"pairtimes", "mean times together / apart for two tagged particles"},
                      {"simulate", "Gillespie simulation"},
                      {"compare", "exact values against simulation, flagging 3-sigma misses"},
                      {"sweep", "one quantity over a parameter grid"},
                      {"emit", "plot-ready data (g1-error, mean-counts, pi-k, p2-vs-a)"}};
  for (const auto& s : subs) {
    auto* sc = app.add_subcommand(s.name, s.help);
    add_common(sc, o);
    const std::string name = s.name;
    if (name == "exact" || name == "sweep" || name == "emit" || name == "analytic")
      sc->add_option("--quantity", o.quantity, "quantity to report");
    if (name == "exact") sc->add_flag("--limit", o.limit, "a -> 0 nucleation limit (exact rationals)");
    if (name == "analytic") {
      sc->add_option("--method", o.method, "exact, asymptotic, continued_fraction or taylor")->capture_default_str();
      sc->add_option("--index", o.index, "n for G_n and mu_n")->capture_default_str();
    }
    if (name == "simulate" || name == "compare") {
      sc->add_option("--sim-t", o.sim_t, "simulated time per replica (default 1e4)");
      sc->add_option("--burn-in", o.burn_in, "discarded initial time (default 1% of --sim-t)");
      sc->add_option("--replicas", o.replicas, "independent replicas (default 16)");
      sc->add_option("--initial", o.initial, "singletons or single-cluster")->capture_default_str();
    }
    if (name == "simulate") {
      sc->add_flag("--track-pair", o.track_pair, "follow particles 1 and 2");
      sc->add_option("--events", o.events, "write the replica-0 event log (CSV)");
    }
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage_error;
  }
  try {
    for (const auto* sc : app.get_subcommands()) return execute(sc->get_name(), o, out, err);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return usage_error;
  } catch (const ComputeError& e) {
    err << "error: " << e.what() << "\n";
    return compute_error;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return compute_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return compute_error;
  }
  return usage_error;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace cfp::cli
