#include <cmath>

#include "cfp/errors.hpp"
#include "cfp/exact.hpp"
#include "cfp/hypergeom.hpp"
#include "cfp/pairtimes.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cfp;
using oracle::rel;

namespace {

// Every rate of `base` multiplied by c; same weights, still balanced.
KernelSpec scaled(const KernelSpec& base, int len, const Rational& c) {
  const Kernel k(base);
  KernelTables t;
  for (int i = 1; i <= len; ++i) t.a.push_back(k.weight<Rational>(i));
  t.coag.assign(static_cast<std::size_t>(len), std::vector<Rational>(static_cast<std::size_t>(len), Rational(0)));
  t.frag = t.coag;
  for (int i = 1; i <= len; ++i)
    for (int j = 1; i + j <= len; ++j) {
      t.coag[i - 1][j - 1] = c * k.coag<Rational>(i, j);
      t.frag[i - 1][j - 1] = c * k.frag<Rational>(i, j);
    }
  return KernelSpec::tabulated(t);
}

}  // namespace

TEST_CASE("N = 2 chains") {
  for (double a : {0.2, 1.0, 5.0}) {
    const Kernel kern(KernelSpec::constant(rational_from_double(a)));
    const auto sep = build_pair_chain(kern, 2, PairTarget::separation);
    REQUIRE(sep.states.size() == 1);
    CHECK(sep.holding[0] == doctest::Approx(1.0 / a));
    CHECK(sep.jump(0, 1) == 1.0);
    const auto ts = mean_absorption_times(sep);
    CHECK(rel(ts.t[0], 1.0 / a) < 1e-15);
    const auto tr = mean_absorption_times(build_pair_chain(kern, 2, PairTarget::reunion));
    CHECK(rel(tr.t[0], 1.0) < 1e-15);

    const auto rep = pair_times(kern, 2);
    CHECK(rel(rep.t_s, 1.0 / a) < 1e-15);
    CHECK(rel(rep.t_r, 1.0) < 1e-15);
    CHECK(rel(rep.p2_ratio, 1.0 / (1.0 + a)) < 1e-14);
    CHECK(rel(rep.p2_ratio, g_n(1, a, 2).value) < 1e-14);
  }
}

TEST_CASE("N = 3 separation chain by hand") {
  const double a = 0.7;
  const Kernel kern(KernelSpec::constant(rational_from_double(a)));
  const auto chain = build_pair_chain(kern, 3, PairTarget::separation);
  REQUIRE(chain.states.size() == 2);
  // State A: pair in a 2-cluster plus a singleton. Out: split a (absorb), merge 1.
  // State B: pair in the 3-cluster. Out: d(3) = 2a, each split keeps the
  // pair with probability 1/3.
  const auto A = *chain.lookup({occupancy_from_sizes({{2, 1}}), 2, 0});
  const auto B = *chain.lookup({occupancy_from_sizes({{3}}), 3, 0});
  const auto t = mean_absorption_times(chain).t;
  // tA = 1/(a+1) + tB/(a+1);  tB = 1/(2a) + tA/3
  const double tB = (1.0 / (2 * a) + 1.0 / (3 * (a + 1))) / (1.0 - 1.0 / (3 * (a + 1)));
  const double tA = (1.0 + tB) / (a + 1);
  CHECK(rel(t[A], tA) < 1e-14);
  CHECK(rel(t[B], tB) < 1e-14);
  CHECK(rel(pair_times(Kernel(KernelSpec::constant(1)), 3).p2_ratio, 5.0 / 11) < 1e-10);
}

TEST_CASE("chain construction invariants") {
  for (const auto& spec : {KernelSpec::constant(Rational(1, 2)), KernelSpec::linear(Rational(3)),
                           KernelSpec::bounded(Rational(2), 4)}) {
    const Kernel kern(spec);
    for (auto target : {PairTarget::separation, PairTarget::reunion}) {
      const auto chain = build_pair_chain(kern, 9, target);
      const auto S = static_cast<Eigen::Index>(chain.states.size());
      CHECK(chain.jump(S, S) == 1.0);
      CHECK(chain.jump.row(S).sum() == 1.0);
      for (Eigen::Index s = 0; s < S; ++s) {
        CHECK(std::abs(chain.jump.row(s).sum() - 1.0) < 1e-12);
        CHECK(chain.holding[static_cast<std::size_t>(s)] > 0.0);
        CHECK(chain.jump(s, s) == 0.0);
        const auto& m = chain.states[static_cast<std::size_t>(s)].config;
        double out = 0.0;
        for (int k = 2; k <= 9; ++k) out += total_dissociation(kern, k) * m.m(k);
        for (int i = 1; i <= 9; ++i)
          for (int j = i; i + j <= 9; ++j)
            out += kern.coag(i, j) * (i == j ? m.m(i) * (m.m(i) - 1) / 2.0 : 1.0 * m.m(i) * m.m(j));
        CHECK(rel(chain.holding[static_cast<std::size_t>(s)], 1.0 / out) < 1e-13);
      }
      for (std::size_t s = 0; s < chain.states.size(); ++s) CHECK(chain.lookup(chain.states[s]) == s);
    }
  }
}

TEST_CASE("time rescaling") {
  const auto base = KernelSpec::linear(Rational(1, 2));
  const auto fast = scaled(base, 8, Rational(3));
  const auto r0 = pair_times(Kernel(base), 8);
  const auto r1 = pair_times(Kernel(fast), 8);
  CHECK(rel(r1.t_s, r0.t_s / 3) < 1e-12);
  CHECK(rel(r1.t_r, r0.t_r / 3) < 1e-12);
  CHECK(rel(r1.p2_ratio, r0.p2_ratio) < 1e-12);
}

TEST_CASE("renewal identity for built-in kernels") {
  double worst = 0.0, residual = 0.0;
  for (double a : {0.2, 1.0, 5.0}) {
    const Rational ar = rational_from_double(a);
    for (const auto& spec : {KernelSpec::constant(ar), KernelSpec::linear(ar), KernelSpec::bounded(ar, 4)})
      for (int n = 2; n <= 10; ++n) {
        const auto rep = pair_times(Kernel(spec), n);
        worst = std::max(worst, std::abs(rep.p2_ratio - rep.p2_exact));
        residual = std::max(residual, rep.max_residual);
        CHECK(rep.t_s > 0.0);
        CHECK(rep.t_r > 0.0);
      }
  }
  CHECK(worst < 1e-8);
  CHECK(residual < 1e-10);
}

TEST_CASE("equilibrium-start averages are residual times, not episode means") {
  const auto rep = pair_times(Kernel(KernelSpec::constant(1)), 12);
  CHECK(std::abs(rep.t_s_equilibrium / (rep.t_s_equilibrium + rep.t_r_equilibrium) - rep.p2_exact) > 1e-3);
}

TEST_CASE("stationarity consistency of start laws") {
  for (const auto& spec : {KernelSpec::constant(Rational(1, 3)), KernelSpec::linear(Rational(2)),
                           KernelSpec::bounded(Rational(1), 4)})
    for (int n : {2, 5, 9, 12}) CHECK(stationarity_gap(Kernel(spec), n) < 1e-10);
}

TEST_CASE("start distributions are normalized") {
  const Kernel kern(KernelSpec::bounded(Rational(1, 2), 3));
  for (auto target : {PairTarget::separation, PairTarget::reunion}) {
    const auto chain = build_pair_chain(kern, 7, target);
    for (auto kind : {StartDistribution::equilibrium, StartDistribution::entrance}) {
      const auto w = start_distribution(kern, chain, kind);
      double total = 0.0;
      for (double v : w) {
        CHECK(v >= 0.0);
        total += v;
      }
      CHECK(std::abs(total - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("pair chain errors") {
  const Kernel kern(KernelSpec::constant(1));
  CHECK_THROWS_AS(build_pair_chain(kern, 1, PairTarget::separation), InvalidArgument);
  CHECK_THROWS_AS(build_pair_chain(kern, 21, PairTarget::separation), ResourceError);
  CHECK_THROWS_AS(build_pair_chain(kern, 15, PairTarget::reunion), ResourceError);
  CHECK_THROWS_AS(build_pair_chain(Kernel(KernelSpec::bounded(1, 1)), 4, PairTarget::separation), DegenerateChain);

  // Hand-made chain with a trapped state.
  PairChain broken;
  broken.n = 2;
  broken.states.push_back({occupancy_from_sizes({{2}}), 2, 0});
  broken.states.push_back({occupancy_from_sizes({{1, 1}}), 1, 1});
  broken.jump = Eigen::MatrixXd::Zero(3, 3);
  broken.jump(0, 2) = 1.0;
  broken.jump(1, 1) = 1.0;
  broken.jump(2, 2) = 1.0;
  broken.holding = {1.0, 1.0};
  CHECK_THROWS_AS(mean_absorption_times(broken), StructuralError);
}
