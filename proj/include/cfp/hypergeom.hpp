#ifndef CFP_HYPERGEOM_HPP
#define CFP_HYPERGEOM_HPP

#include <string_view>

#include "cfp/exact.hpp"
#include "cfp/numeric.hpp"

namespace cfp {

/// 1F1(-m; b; z) = sum_{n=0}^{m} ((-m)_n / (b)_n) z^n / n!, exactly.
Rational kummer_terminating(int m, int b, const Rational& z);

/// Floating evaluation. For z <= 0 every term is non-negative and the sum
/// is compensated; for z > 0 the terms alternate and m <= 200 is summed
/// exactly from the binary value of z before rounding once.
double kummer_terminating(int m, int b, double z);

/// log 1F1(-m; b; z) for z <= 0, safe for m in the thousands.
double log_kummer_terminating(int m, int b, double z);

enum class GMethod { exact, asymptotic, continued_fraction, taylor };

std::string_view to_string(GMethod m);
GMethod parse_g_method(std::string_view name);

struct GValue {
  int n = 0;
  double a = 0.0;
  int N = 0;
  double value = 0.0;
  GMethod method = GMethod::exact;
  bool approximation = false;
};

/// G_n = 1F1(-N+1+n; 2+n; -2a) / 1F1(-N+1; 2; -2a), 0 <= n <= N - 1, or one
/// of its approximations. continued_fraction and taylor need n = 1.
GValue g_n(int n, double a, int N, GMethod method = GMethod::exact);
Rational g_n_exact(int n, const Rational& a, int N);

/// Continued-fraction coefficient c_k, 1 <= k <= 2N - 3:
/// G_1 = 1 / (1 + c_1 a / (1 + c_2 a / (... / (1 + c_{2N-3} a)))).
Rational continued_fraction_coefficient(int k, int N);

/// Third-order expansion of G_1 about a = 0.
double g1_taylor(double a, int N);

/// Pi_K from the constant-kernel ladder
/// Pi_{K+1} / Pi_1 = (2a)^K (N-1)! / (K! (K+1)! (N-K-1)!).
ClusterCountDistribution<Rational> pi_constant(int N, const Rational& a);
ClusterCountDistribution<double> pi_constant(int N, double a);

/// k! S(n+1, k+1) = sum_j (-1)^j C(k,j) (k+1-j)^n, 0 <= k <= n.
BigInt alpha_coefficient(int k, int n);

/// mu_n = <K^n> = sum_k alpha_k^n (Pi_{k+1}/Pi_1) G_k.
double mu_n(int n, double a, int N);
Rational mu_n_exact(int n, const Rational& a, int N);

/// a(N-1) G_1 + (2/3) a^2 (N-1)(N-2) G_2 - a^2 (N-1)^2 G_1^2.
double variance_constant(double a, int N);

/// 1 + sqrt(2aN) exp(-sqrt(a / 2N)). Approximation.
double mu1_asymptotic(double a, int N);

/// <M_n> = 2a 1F1(-N+1+n; 2; -2a) / 1F1(-N+1; 2; -2a) for n < N and
/// 1 / 1F1(-N+1; 2; -2a) for n = N.
double mean_counts_constant(int n, double a, int N);
Rational mean_counts_constant_exact(int n, const Rational& a, int N);

/// <P_2> = G_1, or sqrt(2 / (aN)) when asymptotic.
double p2_constant(double a, int N, bool asymptotic = false);

}  // namespace cfp

#endif  // CFP_HYPERGEOM_HPP
