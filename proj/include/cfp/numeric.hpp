#ifndef CFP_NUMERIC_HPP
#define CFP_NUMERIC_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/gmp.hpp>

#include "cfp/errors.hpp"

namespace cfp {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

enum class NumericMode { exact, floating };

// Non-negative real stored as its natural logarithm. Zero is -inf.
// Products and ratios of normalization constants stay finite far past
// the double overflow point (C_{N,K} overflows near N ~ 170).
class LogReal {
 public:
  LogReal() = default;
  explicit LogReal(double value) {
    if (value < 0.0 || std::isnan(value)) throw InvalidArgument("LogReal requires a non-negative value");
    log_ = value == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(value);
  }
  static LogReal from_log(double log_value) {
    LogReal r;
    r.log_ = log_value;
    return r;
  }

  double log() const { return log_; }
  double value() const { return std::exp(log_); }
  bool is_zero() const { return std::isinf(log_) && log_ < 0.0; }

  LogReal& operator*=(const LogReal& o) {
    if (is_zero() || o.is_zero()) {
      *this = LogReal();
    } else {
      log_ += o.log_;
    }
    return *this;
  }
  LogReal& operator/=(const LogReal& o) {
    if (o.is_zero()) throw NumericError("LogReal division by zero");
    if (!is_zero()) log_ -= o.log_;
    return *this;
  }
  LogReal& operator+=(const LogReal& o) {
    if (o.is_zero()) return *this;
    if (is_zero()) return *this = o;
    const double hi = std::max(log_, o.log_);
    const double lo = std::min(log_, o.log_);
    log_ = hi + std::log1p(std::exp(lo - hi));
    return *this;
  }

  friend LogReal operator*(LogReal a, const LogReal& b) { return a *= b; }
  friend LogReal operator/(LogReal a, const LogReal& b) { return a /= b; }
  friend LogReal operator+(LogReal a, const LogReal& b) { return a += b; }
  friend bool operator==(const LogReal& a, const LogReal& b) { return a.log_ == b.log_; }
  friend bool operator<(const LogReal& a, const LogReal& b) { return a.log_ < b.log_; }

 private:
  double log_ = -std::numeric_limits<double>::infinity();
};

// Scalar used for probabilities and moments that come out of a table of
// type T: exact tables give exact answers, log tables give doubles.
template <class T>
using prob_t = std::conditional_t<std::is_same_v<T, Rational>, Rational, double>;

template <class T>
struct Num;

template <>
struct Num<Rational> {
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static Rational from_int(std::int64_t v) { return Rational(v); }
  static bool is_zero(const Rational& v) { return v == 0; }
  static double to_double(const Rational& v) { return v.convert_to<double>(); }
  // value / ratio for prob_t; both are exact here.
  static Rational ratio(const Rational& num, const Rational& den) { return num / den; }
};

template <>
struct Num<LogReal> {
  static LogReal zero() { return LogReal(); }
  static LogReal one() { return LogReal::from_log(0.0); }
  static LogReal from_int(std::int64_t v) { return LogReal(static_cast<double>(v)); }
  static bool is_zero(const LogReal& v) { return v.is_zero(); }
  static double to_double(const LogReal& v) { return v.value(); }
  static double ratio(const LogReal& num, const LogReal& den) { return (num / den).value(); }
};

template <>
struct Num<double> {
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double from_int(std::int64_t v) { return static_cast<double>(v); }
  static bool is_zero(double v) { return v == 0.0; }
  static double to_double(double v) { return v; }
  static double ratio(double num, double den) { return num / den; }
};

inline double to_double(const Rational& v) { return v.convert_to<double>(); }
inline double to_double(double v) { return v; }
inline double to_double(const LogReal& v) { return v.value(); }

// Parses "3", "-0.25", "1e-5", "2.5E3" or "p/q" into an exact rational.
Rational parse_rational(std::string_view text);

// Exact rational equal to the shortest decimal that round-trips `value`,
// so 0.2 becomes 1/5 rather than the nearest dyadic fraction.
Rational rational_from_double(double value);

// "p/q" (or "p" when q = 1).
std::string to_string(const Rational& v);

// Shortest round-trip decimal representation.
std::string format_double(double v);

Rational factorial(unsigned n);
double log_factorial(unsigned n);
BigInt binomial(unsigned n, unsigned k);

}  // namespace cfp

#endif  // CFP_NUMERIC_HPP
