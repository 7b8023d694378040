#include "cfp/hypergeom.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "cfp/errors.hpp"

namespace cfp {

namespace {

void check_kummer(int m, int b) {
  if (m < 0) throw InvalidArgument("1F1 first parameter must be a non-positive integer (m >= 0)");
  if (b < 1) throw InvalidArgument("1F1 second parameter must be >= 1");
}

void check_constant_args(double a, int N) {
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("a must be positive and finite");
  if (N < 2) throw InvalidArgument("N must be >= 2");
}

void check_constant_args(const Rational& a, int N) {
  if (a <= 0) throw InvalidArgument("a must be positive");
  if (N < 2) throw InvalidArgument("N must be >= 2");
}

// Neumaier-compensated running sum.
struct Compensated {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      c += (sum - t) + x;
    } else {
      c += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + c; }
};

double log_pi_ratio(int k, double a, int N) {
  return k * std::log(2.0 * a) + log_factorial(static_cast<unsigned>(N - 1)) - log_factorial(static_cast<unsigned>(k)) -
         log_factorial(static_cast<unsigned>(k + 1)) - log_factorial(static_cast<unsigned>(N - k - 1));
}

Rational pi_ratio(int k, const Rational& a, int N) {
  Rational r = factorial(static_cast<unsigned>(N - 1)) /
               (factorial(static_cast<unsigned>(k)) * factorial(static_cast<unsigned>(k + 1)) *
                factorial(static_cast<unsigned>(N - k - 1)));
  for (int j = 0; j < k; ++j) r *= 2 * a;
  return r;
}

double log_g(int n, double a, int N) {
  return log_kummer_terminating(N - 1 - n, 2 + n, -2.0 * a) - log_kummer_terminating(N - 1, 2, -2.0 * a);
}

}  // namespace

Rational kummer_terminating(int m, int b, const Rational& z) {
  check_kummer(m, b);
  Rational term = 1;
  Rational sum = 1;
  for (int n = 0; n < m; ++n) {
    term = term * Rational(n - m) / Rational(b + n) * z / Rational(n + 1);
    sum += term;
  }
  return sum;
}

double log_kummer_terminating(int m, int b, double z) {
  check_kummer(m, b);
  if (z > 0.0) throw InvalidArgument("log-form 1F1 requires z <= 0");
  if (z == 0.0 || m == 0) return 0.0;
  const double lz = std::log(-z);
  LogReal sum = LogReal::from_log(0.0);
  double lt = 0.0;
  for (int n = 0; n < m; ++n) {
    lt += std::log(static_cast<double>(m - n)) - std::log(static_cast<double>(b + n)) + lz -
          std::log(static_cast<double>(n + 1));
    sum += LogReal::from_log(lt);
  }
  return sum.log();
}

double kummer_terminating(int m, int b, double z) {
  check_kummer(m, b);
  if (!std::isfinite(z)) throw InvalidArgument("z must be finite");
  if (z > 0.0) {
    if (m <= 200) return to_double(kummer_terminating(m, b, Rational(z)));
    Compensated acc;
    double term = 1.0;
    acc.add(term);
    for (int n = 0; n < m; ++n) {
      term *= static_cast<double>(n - m) / (b + n) * z / (n + 1);
      acc.add(term);
    }
    return acc.value();
  }
  Compensated acc;
  double term = 1.0;
  acc.add(term);
  for (int n = 0; n < m; ++n) {
    term *= static_cast<double>(m - n) / (b + n) * -z / (n + 1);
    acc.add(term);
  }
  const double v = acc.value();
  if (std::isfinite(v)) return v;
  return std::exp(log_kummer_terminating(m, b, z));
}

std::string_view to_string(GMethod m) {
  switch (m) {
    case GMethod::exact:
      return "exact";
    case GMethod::asymptotic:
      return "asymptotic";
    case GMethod::continued_fraction:
      return "continued_fraction";
    case GMethod::taylor:
      return "taylor";
  }
  return "unknown";
}

GMethod parse_g_method(std::string_view name) {
  if (name == "exact") return GMethod::exact;
  if (name == "asymptotic") return GMethod::asymptotic;
  if (name == "continued_fraction" || name == "continued-fraction" || name == "cf") return GMethod::continued_fraction;
  if (name == "taylor") return GMethod::taylor;
  throw InvalidArgument("unknown G method '" + std::string(name) + "'");
}

Rational continued_fraction_coefficient(int k, int N) {
  if (N < 2 || k < 1 || k > 2 * N - 3) throw InvalidArgument("continued-fraction level out of range");
  const int tri = (k + 1) * (k + 2) / 2;
  if (k % 2 == 1) {
    const int j = (k + 1) / 2;
    return Rational(N + j, tri);
  }
  const int j = k / 2;
  return Rational(N - 1 - j, tri);
}

double g1_taylor(double a, int N) {
  const double f1 = (N + 1) / 3.0;
  const double f2 = (N - 2) / 6.0;
  const double f3 = (N + 2) / 10.0;
  const double c2 = f1 * f1 + f1 * f2;
  const double c3 = f1 * f2 * f3 + f1 * f2 * f2 + 2.0 * f1 * f1 * f2 + f1 * f1 * f1;
  return 1.0 - f1 * a + c2 * a * a - c3 * a * a * a;
}

GValue g_n(int n, double a, int N, GMethod method) {
  check_constant_args(a, N);
  if (n < 0 || n > N - 1) throw InvalidArgument("G_n needs 0 <= n <= N - 1");
  GValue g{n, a, N, 0.0, method, method != GMethod::exact};
  switch (method) {
    case GMethod::exact:
      g.value = n == 0 ? 1.0 : std::exp(log_g(n, a, N));
      break;
    case GMethod::asymptotic: {
      const double x = 2.0 * a * N;
      g.value = std::exp(std::lgamma(n + 2.0) - 0.5 * n * std::log(x) - n * std::sqrt(a / (2.0 * N)));
      break;
    }
    case GMethod::continued_fraction: {
      if (n != 1) throw InvalidArgument("the continued fraction is defined for G_1 only");
      const int depth = 2 * N - 3;
      double v = 1.0 + to_double(continued_fraction_coefficient(depth, N)) * a;
      for (int k = depth - 1; k >= 1; --k) v = 1.0 + to_double(continued_fraction_coefficient(k, N)) * a / v;
      g.value = 1.0 / v;
      break;
    }
    case GMethod::taylor:
      if (n != 1) throw InvalidArgument("the Taylor expansion is defined for G_1 only");
      g.value = g1_taylor(a, N);
      break;
  }
  return g;
}

Rational g_n_exact(int n, const Rational& a, int N) {
  check_constant_args(a, N);
  if (n < 0 || n > N - 1) throw InvalidArgument("G_n needs 0 <= n <= N - 1");
  return kummer_terminating(N - 1 - n, 2 + n, -2 * a) / kummer_terminating(N - 1, 2, -2 * a);
}

ClusterCountDistribution<Rational> pi_constant(int N, const Rational& a) {
  if (N < 1) throw InvalidArgument("N must be >= 1");
  if (a <= 0) throw InvalidArgument("a must be positive");
  ClusterCountDistribution<Rational> out;
  out.n = N;
  Rational total = 0;
  for (int k = 0; k < N; ++k) {
    out.pi.push_back(pi_ratio(k, a, N));
    total += out.pi.back();
  }
  for (auto& p : out.pi) p /= total;
  return out;
}

ClusterCountDistribution<double> pi_constant(int N, double a) {
  if (N < 1) throw InvalidArgument("N must be >= 1");
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("a must be positive and finite");
  std::vector<double> logs;
  LogReal total;
  for (int k = 0; k < N; ++k) {
    logs.push_back(log_pi_ratio(k, a, N));
    total += LogReal::from_log(logs.back());
  }
  ClusterCountDistribution<double> out;
  out.n = N;
  for (double l : logs) out.pi.push_back(std::exp(l - total.log()));
  return out;
}

BigInt alpha_coefficient(int k, int n) {
  if (n < 0 || k < 0 || k > n) throw InvalidArgument("alpha_k^n needs 0 <= k <= n");
  BigInt sum = 0;
  for (int j = 0; j <= k; ++j) {
    BigInt p = 1;
    for (int r = 0; r < n; ++r) p *= (k + 1 - j);
    const BigInt term = binomial(static_cast<unsigned>(k), static_cast<unsigned>(j)) * p;
    if (j % 2 == 0) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  return sum;
}

double mu_n(int n, double a, int N) {
  check_constant_args(a, N);
  if (n < 1) throw InvalidArgument("moment order must be >= 1");
  if (n == 1) return 1.0 + a * (N - 1) * g_n(1, a, N).value;
  LogReal sum = LogReal::from_log(0.0);
  for (int k = 1; k <= std::min(n, N - 1); ++k) {
    const double la = std::log(alpha_coefficient(k, n).convert_to<double>());
    sum += LogReal::from_log(la + log_pi_ratio(k, a, N) + log_g(k, a, N));
  }
  return sum.value();
}

Rational mu_n_exact(int n, const Rational& a, int N) {
  check_constant_args(a, N);
  if (n < 1) throw InvalidArgument("moment order must be >= 1");
  Rational sum = 1;
  for (int k = 1; k <= std::min(n, N - 1); ++k)
    sum += Rational(alpha_coefficient(k, n)) * pi_ratio(k, a, N) * g_n_exact(k, a, N);
  return sum;
}

double variance_constant(double a, int N) {
  check_constant_args(a, N);
  const double g1 = g_n(1, a, N).value;
  const double g2 = N >= 3 ? g_n(2, a, N).value : 0.0;
  const double n1 = N - 1.0;
  return a * n1 * g1 + (2.0 / 3.0) * a * a * n1 * (N - 2.0) * g2 - a * a * n1 * n1 * g1 * g1;
}

double mu1_asymptotic(double a, int N) {
  check_constant_args(a, N);
  return 1.0 + std::sqrt(2.0 * a * N) * std::exp(-std::sqrt(a / (2.0 * N)));
}

double mean_counts_constant(int n, double a, int N) {
  check_constant_args(a, N);
  if (n < 1 || n > N) throw InvalidArgument("cluster size must satisfy 1 <= n <= N");
  const double l0 = log_kummer_terminating(N - 1, 2, -2.0 * a);
  if (n == N) return std::exp(-l0);
  return 2.0 * a * std::exp(log_kummer_terminating(N - 1 - n, 2, -2.0 * a) - l0);
}

Rational mean_counts_constant_exact(int n, const Rational& a, int N) {
  check_constant_args(a, N);
  if (n < 1 || n > N) throw InvalidArgument("cluster size must satisfy 1 <= n <= N");
  const Rational m0 = kummer_terminating(N - 1, 2, -2 * a);
  if (n == N) return 1 / m0;
  return 2 * a * kummer_terminating(N - 1 - n, 2, -2 * a) / m0;
}

double p2_constant(double a, int N, bool asymptotic) {
  check_constant_args(a, N);
  if (asymptotic) return std::sqrt(2.0 / (a * N));
  return g_n(1, a, N).value;
}

}  // namespace cfp
