#include <cmath>
#include <vector>

#include "cfp/errors.hpp"
#include "cfp/exact.hpp"
#include "cfp/hypergeom.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cfp;
using oracle::rel;

namespace {

// Stirling numbers of the second kind by the triangle recurrence.
std::vector<std::vector<BigInt>> stirling2(int n) {
  std::vector<std::vector<BigInt>> s(static_cast<std::size_t>(n) + 1, std::vector<BigInt>(static_cast<std::size_t>(n) + 1, 0));
  s[0][0] = 1;
  for (int i = 1; i <= n; ++i)
    for (int k = 1; k <= i; ++k) s[i][k] = k * s[i - 1][k] + s[i - 1][k - 1];
  return s;
}

Rational cf_exact(const Rational& a, int N) {
  const int depth = 2 * N - 3;
  Rational v = 1 + continued_fraction_coefficient(depth, N) * a;
  for (int k = depth - 1; k >= 1; --k) v = 1 + continued_fraction_coefficient(k, N) * a / v;
  return 1 / v;
}

}  // namespace

TEST_CASE("Kummer examples") {
  CHECK(kummer_terminating(0, 5, Rational(-17, 3)) == 1);
  CHECK(kummer_terminating(0, 1, 3.25) == 1.0);
  const Rational a(2, 7);
  CHECK(kummer_terminating(1, 2, -2 * a) == 1 + a);
  CHECK(kummer_terminating(2, 2, Rational(-2)) == Rational(11, 3));
  CHECK(kummer_terminating(2, 2, -2.0) == doctest::Approx(11.0 / 3));
  CHECK_THROWS_AS(kummer_terminating(-1, 2, 1.0), InvalidArgument);
  CHECK_THROWS_AS(kummer_terminating(1, 0, 1.0), InvalidArgument);
}

TEST_CASE("floating Kummer tracks the rational sum") {
  double worst = 0.0;
  for (int m = 0; m <= 60; m += 3)
    for (int b : {1, 2, 3, 7})
      for (double z = -200.0; z <= 200.0; z += 12.5) {
        const double ref = to_double(kummer_terminating(m, b, Rational(z)));
        worst = std::max(worst, rel(kummer_terminating(m, b, z), ref));
        if (z <= 0.0 && ref > 0.0) CHECK(std::abs(log_kummer_terminating(m, b, z) - std::log(ref)) < 1e-12);
      }
  CHECK(worst < 1e-13);
}

TEST_CASE("G_n examples") {
  for (double a : {0.1, 1.0, 7.5}) CHECK(rel(g_n(1, a, 2).value, 1.0 / (1.0 + a)) < 1e-15);
  CHECK(g_n_exact(1, Rational(1), 3) == Rational(5, 11));
  CHECK(rel(g_n(1, 1.0, 3).value, 5.0 / 11) < 1e-15);
  CHECK(g_n(0, 3.0, 9).value == 1.0);

  const auto asym = g_n(1, 2.0, 50, GMethod::asymptotic);
  CHECK(asym.approximation);
  CHECK(rel(asym.value, std::sqrt(2.0 / (2.0 * 50)) * std::exp(-std::sqrt(2.0 / 100))) < 1e-14);
  CHECK_FALSE(g_n(1, 2.0, 50).approximation);

  CHECK_THROWS_AS(g_n(2, 1.0, 10, GMethod::continued_fraction), InvalidArgument);
  CHECK_THROWS_AS(g_n(2, 1.0, 10, GMethod::taylor), InvalidArgument);
  CHECK_THROWS_AS(g_n(10, 1.0, 10), InvalidArgument);
  CHECK_THROWS_AS(g_n(1, 0.0, 10), InvalidArgument);
  CHECK_THROWS_AS(g_n(1, 1.0, 1), InvalidArgument);
}

TEST_CASE("continued fraction") {
  CHECK(continued_fraction_coefficient(1, 10) == Rational(11, 3));
  CHECK(continued_fraction_coefficient(2, 10) == Rational(8, 6));
  CHECK(continued_fraction_coefficient(2 * 10 - 3, 10) == Rational(1, 9));
  CHECK(continued_fraction_coefficient(2 * 10 - 4, 10) == Rational(1, 9 * 17));
  for (int N = 2; N <= 14; ++N)
    for (const Rational a : {Rational(1, 10), Rational(1), Rational(9, 2)}) CHECK(cf_exact(a, N) == g_n_exact(1, a, N));
  double worst = 0.0;
  for (int N = 2; N <= 100; ++N)
    for (double a : {1e-3, 0.05, 0.3, 1.0})
      worst = std::max(worst, rel(g_n(1, a, N, GMethod::continued_fraction).value, g_n(1, a, N).value));
  CHECK(worst < 1e-10);
}

TEST_CASE("Taylor expansion error is fourth order") {
  for (int N : {5, 10, 20}) {
    double prev_ratio = 0.0;
    for (const Rational a : {Rational(1, 100), Rational(1, 200), Rational(1, 500), Rational(1, 1000)}) {
      const double ad = to_double(a);
      const double err = std::abs(g1_taylor(ad, N) - to_double(g_n_exact(1, a, N)));
      const double ratio = err / std::pow(ad, 4);
      CHECK(ratio < 10.0 * N * N * N * N);
      if (prev_ratio > 0.0) CHECK(rel(ratio, prev_ratio) < 0.5);
      prev_ratio = ratio;
    }
  }
  // Cubic coefficient at N = 5: f1 f2 f3 + f1 f2^2 + 2 f1^2 f2 + f1^3 = 66/5.
  // Without the 2 f1^2 f2 term it would be 46/5.
  const Rational a(1, 100000);
  const Rational g = g_n_exact(1, a, 5);
  const Rational f1(2), f2(1, 2);
  const Rational quad = 1 - f1 * a + (f1 * f1 + f1 * f2) * a * a;
  CHECK(rel(to_double((quad - g) / (a * a * a)), 66.0 / 5) < 1e-3);
}

TEST_CASE("pi_constant") {
  CHECK(pi_constant(1, 2.0).pi == std::vector<double>{1.0});
  CHECK(pi_constant(3, Rational(1)).pi == std::vector<Rational>{Rational(3, 11), Rational(6, 11), Rational(2, 11)});
  const Rational a(3, 8);
  CHECK(pi_constant(2, a)[1] == 1 / kummer_terminating(1, 2, -2 * a));
  CHECK(pi_constant(2, a)[1] == 1 / (1 + a));
  for (int N = 2; N <= 12; ++N) CHECK(pi_constant(N, a)[1] == 1 / kummer_terminating(N - 1, 2, -2 * a));

  double worst = 0.0;
  for (double av : {1e-3, 0.5, 5.0, 1e3}) {
    const Kernel kern(KernelSpec::constant(rational_from_double(av)));
    for (int N = 1; N <= 60; ++N) {
      const auto closed = pi_constant(N, av);
      const auto ladder = steady_state_pi(rate_schedule(kern, compute_cnk<LogReal>(kern, N)));
      for (int k = 1; k <= N; ++k) worst = std::max(worst, rel(closed[k], ladder[k]));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("alpha coefficients") {
  const auto s = stirling2(12);
  for (int n = 0; n <= 11; ++n) {
    CHECK(alpha_coefficient(0, n) == 1);
    CHECK(alpha_coefficient(n, n) == BigInt(factorial(static_cast<unsigned>(n)).convert_to<BigInt>()));
    for (int k = 0; k <= n; ++k)
      CHECK(alpha_coefficient(k, n) == factorial(static_cast<unsigned>(k)).convert_to<BigInt>() * s[n + 1][k + 1]);
  }
  CHECK(alpha_coefficient(1, 1) == 1);
  CHECK(alpha_coefficient(1, 2) == 3);
  CHECK(alpha_coefficient(2, 2) == 2);
  CHECK_THROWS_AS(alpha_coefficient(3, 2), InvalidArgument);
}

TEST_CASE("cluster-count moments") {
  CHECK(mu_n_exact(1, Rational(1), 3) == Rational(21, 11));
  CHECK(rel(mu_n(1, 1.0, 3), 21.0 / 11) < 1e-15);

  for (const Rational a : {Rational(1, 20), Rational(1), Rational(7, 2)})
    for (int N = 2; N <= 12; ++N) {
      const auto pi = pi_constant(N, a);
      for (int n = 1; n <= 4; ++n) {
        Rational direct = 0;
        for (int k = 1; k <= N; ++k) {
          Rational kn = 1;
          for (int r = 0; r < n; ++r) kn *= k;
          direct += kn * pi[k];
        }
        CHECK(mu_n_exact(n, a, N) == direct);
      }
    }

  double worst = 0.0;
  for (double a : {0.05, 0.5, 5.0, 50.0})
    for (int N = 2; N <= 40; ++N) {
      const auto pi = pi_constant(N, a);
      for (int n = 1; n <= 4; ++n) {
        double direct = 0.0;
        for (int k = 1; k <= N; ++k) direct += std::pow(k, n) * pi[k];
        worst = std::max(worst, rel(mu_n(n, a, N), direct));
      }
      const double m1 = mu_n(1, a, N);
      const double var = mu_n(2, a, N) - m1 * m1;
      CHECK(rel(variance_constant(a, N), var) < 1e-10);
    }
  CHECK(worst < 1e-10);
}

TEST_CASE("mu_1 asymptotic") {
  CHECK(rel(mu1_asymptotic(1.0, 1000), mu_n(1, 1.0, 1000)) < 0.05);
  CHECK(mu1_asymptotic(1e-12, 50) - 1.0 < 1e-4);
  double prev = mu1_asymptotic(1.0, 2);
  for (int N = 3; N <= 10000; ++N) {
    const double v = mu1_asymptotic(1.0, N);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("mean counts") {
  const Rational a(5, 3);
  const auto m2 = [&](int n) { return mean_counts_constant_exact(n, a, 2); };
  CHECK(m2(1) == 2 * a / (1 + a));
  CHECK(m2(2) == 1 / (1 + a));
  CHECK(m2(1) + 2 * m2(2) == 2);

  for (int N = 2; N <= 14; ++N) {
    const auto pi = pi_constant(N, a);
    CHECK(mean_counts_constant_exact(N, a, N) == pi[1]);
    Rational particles = 0;
    for (int n = 1; n < N; ++n) {
      CHECK(mean_counts_constant_exact(n, a, N) == 2 * a * pi[1] / pi_constant(N - n, a)[1]);
      particles += n * mean_counts_constant_exact(n, a, N);
    }
    particles += N * mean_counts_constant_exact(N, a, N);
    CHECK(particles == N);
    const auto sol = solve_exact<Rational>(Kernel(KernelSpec::constant(a)), N);
    for (int n = 1; n <= N; ++n) CHECK(mean_counts_constant_exact(n, a, N) == sol.moments.mean(n));
  }

  for (double av : {0.05, 2.0, 40.0})
    for (int N : {2, 10, 80, 400}) {
      double particles = 0.0;
      for (int n = 1; n <= N; ++n) particles += n * mean_counts_constant(n, av, N);
      CHECK(rel(particles, N) < 1e-10);
    }
}

TEST_CASE("P2 equals G_1") {
  CHECK(rel(p2_constant(0.3, 2), 1.0 / 1.3) < 1e-15);
  CHECK(rel(p2_constant(1.0, 3), 5.0 / 11) < 1e-15);
  CHECK(rel(p2_constant(2.0, 100, true), std::sqrt(2.0 / 200)) < 1e-15);
  for (double a : {0.05, 0.5, 5.0, 50.0}) {
    const Kernel kern(KernelSpec::constant(rational_from_double(a)));
    for (int N = 2; N <= 60; N += 3) {
      const auto sol = solve_exact<LogReal>(kern, N);
      CHECK(rel(sol.p2, p2_constant(a, N)) < 1e-10);
    }
  }
}

TEST_CASE("asymptotic G_1 quality") {
  // a = 1: relative error shrinks with N past the onset and is under 10% at N >= 100.
  double prev = 1.0;
  for (int N : {100, 200, 400, 700, 1000}) {
    const double err = rel(g_n(1, 1.0, N, GMethod::asymptotic).value, g_n(1, 1.0, N).value);
    CHECK(err < 0.1);
    CHECK(err < prev);
    prev = err;
  }
  // a = 10: the signed error changes sign in N.
  bool pos = false, neg = false;
  for (int N = 2; N <= 1000; ++N) {
    const double d = g_n(1, 10.0, N).value - g_n(1, 10.0, N, GMethod::asymptotic).value;
    pos = pos || d > 0;
    neg = neg || d < 0;
  }
  CHECK(pos);
  CHECK(neg);
}
