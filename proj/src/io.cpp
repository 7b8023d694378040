#include "cfp/io.hpp"

#include <fstream>
#include <sstream>

#include "cfp/errors.hpp"

namespace cfp {

namespace {

Rational rational_field(const Json& v, const std::string& what) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number()) return rational_from_double(v.get<double>());
  if (v.is_string()) return parse_rational(v.get<std::string>());
  throw InvalidArgument("kernel spec: '" + what + "' must be a number or numeric string");
}

std::vector<std::vector<Rational>> matrix_field(const Json& v, const std::string& what) {
  if (!v.is_array()) throw InvalidArgument("kernel spec: '" + what + "' must be an array of rows");
  std::vector<std::vector<Rational>> m;
  for (const auto& row : v) {
    if (!row.is_array()) throw InvalidArgument("kernel spec: '" + what + "' rows must be arrays");
    std::vector<Rational> r;
    for (const auto& x : row) r.push_back(rational_field(x, what));
    m.push_back(std::move(r));
  }
  return m;
}

}  // namespace

KernelSpec kernel_spec_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("kernel spec must be a JSON object");
  if (!j.contains("family")) throw InvalidArgument("kernel spec needs a 'family'");
  KernelSpec spec;
  spec.family = parse_kernel_family(j.at("family").get<std::string>());
  if (j.contains("a")) spec.a = rational_field(j.at("a"), "a");
  if (j.contains("M")) {
    if (!j.at("M").is_number_integer()) throw InvalidArgument("kernel spec: 'M' must be an integer");
    spec.max_size = j.at("M").get<int>();
  }
  if (j.contains("tables")) {
    const auto& t = j.at("tables");
    KernelTables tables;
    if (!t.contains("a") || !t.contains("C") || !t.contains("F"))
      throw InvalidArgument("kernel spec: tables need 'a', 'C' and 'F'");
    for (const auto& x : t.at("a")) tables.a.push_back(rational_field(x, "tables.a"));
    tables.coag = matrix_field(t.at("C"), "tables.C");
    tables.frag = matrix_field(t.at("F"), "tables.F");
    spec.tables = std::move(tables);
  }
  if (spec.family == KernelFamily::bounded && !spec.max_size) throw InvalidArgument("bounded kernel requires M");
  if (spec.family == KernelFamily::tabulated && !spec.tables) throw InvalidArgument("tabulated kernel requires tables");
  return spec;
}

Json number_json(const Rational& v) { return to_string(v); }
Json number_json(double v) { return v; }

Json kernel_spec_to_json(const KernelSpec& spec) {
  Json j;
  j["family"] = std::string(to_string(spec.family));
  if (spec.family != KernelFamily::tabulated) j["a"] = to_string(spec.a);
  if (spec.max_size) j["M"] = *spec.max_size;
  if (spec.tables) {
    Json t;
    t["a"] = Json::array();
    for (const auto& x : spec.tables->a) t["a"].push_back(to_string(x));
    for (const auto& [name, m] : {std::pair{"C", &spec.tables->coag}, std::pair{"F", &spec.tables->frag}}) {
      Json rows = Json::array();
      for (const auto& row : *m) {
        Json r = Json::array();
        for (const auto& x : row) r.push_back(to_string(x));
        rows.push_back(r);
      }
      t[name] = rows;
    }
    j["tables"] = t;
  }
  return j;
}

KernelSpec load_kernel_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read kernel spec file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("malformed kernel spec file '" + path + "': " + e.what());
  }
  try {
    return kernel_spec_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("malformed kernel spec file '" + path + "': " + e.what());
  }
}

Json partition_to_json(const OccupancyPartition& m) {
  Json j = Json::array();
  for (auto [size, count] : m.sparse()) j.push_back({size, count});
  return j;
}

OccupancyPartition partition_from_json(int n, const Json& j) {
  if (!j.is_array()) throw InvalidArgument("partition must be an array of [size, count] pairs");
  std::vector<std::pair<int, int>> pairs;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer())
      throw InvalidArgument("partition entries must be [size, count] integer pairs");
    pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
  }
  return OccupancyPartition::from_sparse(n, pairs);
}

template <class T>
Json cnk_table_to_json(const CnkTable<T>& table) {
  Json j;
  j["N"] = table.n();
  j["numeric"] = table.mode() == NumericMode::exact ? "rational" : "float";
  Json rows = Json::array();
  for (int n = 1; n <= table.n(); ++n) {
    Json row = Json::array();
    for (int k = 1; k <= n; ++k) {
      if constexpr (std::is_same_v<T, Rational>) {
        row.push_back(to_string(table(n, k)));
      } else {
        row.push_back(table(n, k).value());
      }
    }
    rows.push_back(row);
  }
  j["C"] = rows;
  if constexpr (std::is_same_v<T, LogReal>) {
    Json logs = Json::array();
    for (int n = 1; n <= table.n(); ++n) {
      Json row = Json::array();
      for (int k = 1; k <= n; ++k) {
        const double l = table(n, k).log();
        row.push_back(std::isfinite(l) ? Json(l) : Json(nullptr));
      }
      logs.push_back(row);
    }
    j["log_C"] = logs;
  }
  return j;
}

template <class P>
Json moment_report_to_json(const MomentReport<P>& report) {
  Json j;
  j["N"] = report.n;
  j["K"] = report.k ? Json(*report.k) : Json(nullptr);
  Json means = Json::array(), second = Json::array();
  for (const auto& v : report.means) means.push_back(number_json(v));
  for (const auto& v : report.second_moments) second.push_back(number_json(v));
  j["mean_counts"] = means;
  j["second_moments"] = second;
  Json cov = Json::array();
  for (const auto& c : report.covariances) cov.push_back({{"i", c.i}, {"j", c.j}, {"value", number_json(c.value)}});
  j["covariances"] = cov;
  return j;
}

template <class P>
std::string pi_to_csv(const ClusterCountDistribution<P>& pi) {
  std::ostringstream out;
  out << "K,pi\n";
  for (int k = 1; k <= pi.n; ++k) {
    if constexpr (std::is_same_v<P, Rational>) {
      out << k << ',' << to_string(pi[k]) << '\n';
    } else {
      out << k << ',' << format_double(pi[k]) << '\n';
    }
  }
  return out.str();
}

Json pair_times_to_json(const PairTimesReport& r) {
  Json j;
  j["N"] = r.n;
  j["t_s"] = r.t_s;
  j["t_r"] = r.t_r;
  j["p2_ratio"] = r.p2_ratio;
  j["p2_exact"] = r.p2_exact;
  j["max_residual"] = r.max_residual;
  j["t_s_equilibrium_start"] = r.t_s_equilibrium;
  j["t_r_equilibrium_start"] = r.t_r_equilibrium;
  j["separation_states"] = r.separation_states;
  j["reunion_states"] = r.reunion_states;
  return j;
}

namespace {

Json estimate_json(const Estimate& e) {
  auto num = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  return {{"value", num(e.value)}, {"se", num(e.se)}};
}

}  // namespace

Json sim_stats_to_json(const SimStats& s) {
  Json j;
  const auto& c = s.config;
  j["config"] = {{"N", c.n},
                 {"t_end", c.t_end},
                 {"burn_in", c.burn_in},
                 {"seed", c.seed},
                 {"replicas", c.replicas},
                 {"track_pair", c.track_pair},
                 {"initial", c.initial == InitialCondition::singletons       ? "singletons"
                             : c.initial == InitialCondition::single_cluster ? "single-cluster"
                                                                             : "given"}};
  if (c.given) j["config"]["given"] = partition_to_json(*c.given);
  j["rng"] = s.rng_algorithm;
  j["mean_clusters"] = estimate_json(s.mean_clusters);
  Json pi = Json::array(), counts = Json::array();
  for (int k = 1; k <= c.n; ++k) {
    Json e = estimate_json(s.pi[static_cast<std::size_t>(k - 1)]);
    e["K"] = k;
    pi.push_back(e);
  }
  for (int i = 1; i <= c.n; ++i) {
    Json e = estimate_json(s.mean_counts[static_cast<std::size_t>(i - 1)]);
    e["i"] = i;
    counts.push_back(e);
  }
  j["pi"] = pi;
  j["mean_counts"] = counts;
  if (c.track_pair) {
    j["p2"] = estimate_json(s.p2);
    long te = 0, ae = 0;
    for (const auto& r : s.replicas) {
      te += r.together_episodes;
      ae += r.apart_episodes;
    }
    j["episodes"] = {{"together", te}, {"apart", ae}};
    if (te > 0 && ae > 0) {
      const auto pt = estimate_pair_times(s);
      j["t_s"] = estimate_json(pt.t_s);
      j["t_r"] = estimate_json(pt.t_r);
      j["episode_ratio"] = pt.episode_ratio;
    }
  }
  long events = 0;
  double observed = 0.0;
  for (const auto& r : s.replicas) {
    events += r.events;
    observed += r.observed_time;
  }
  j["events"] = events;
  j["observed_time"] = observed;
  j["early_stops"] = s.early_stops;
  Json flux = Json::array();
  const auto coag = s.total_coagulations();
  const auto frag = s.total_fragmentations();
  std::map<SizePair, std::pair<long, long>> merged;
  for (const auto& [k, v] : coag) merged[k].first = v;
  for (const auto& [k, v] : frag) merged[k].second = v;
  for (const auto& [k, v] : merged)
    flux.push_back({{"i", k.first}, {"j", k.second}, {"coagulations", v.first}, {"fragmentations", v.second}});
  j["flux"] = flux;
  j["warnings"] = s.warnings;
  return j;
}

std::string event_log_to_csv(const EventLog& log) {
  std::ostringstream out;
  out << "time,kind,size_a,size_b\n";
  for (const auto& e : log.events)
    out << format_double(e.time) << ',' << (e.coagulation ? "coagulation" : "fragmentation") << ',' << e.size_a << ','
        << e.size_b << '\n';
  return out.str();
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return s;
}

template Json cnk_table_to_json<Rational>(const CnkTable<Rational>&);
template Json cnk_table_to_json<LogReal>(const CnkTable<LogReal>&);
template Json moment_report_to_json<Rational>(const MomentReport<Rational>&);
template Json moment_report_to_json<double>(const MomentReport<double>&);
template std::string pi_to_csv<Rational>(const ClusterCountDistribution<Rational>&);
template std::string pi_to_csv<double>(const ClusterCountDistribution<double>&);

}  // namespace cfp
