#include "cfp/numeric.hpp"

#include <array>
#include <cctype>
#include <charconv>

namespace cfp {

namespace {

BigInt pow10(unsigned e) {
  BigInt r = 1;
  for (unsigned i = 0; i < e; ++i) r *= 10;
  return r;
}

Rational parse_decimal(std::string_view text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    negative = text[pos] == '-';
    ++pos;
  }
  std::string digits;
  long exponent = 0;
  bool seen_digit = false;
  bool seen_point = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw InvalidArgument("not a number: '" + std::string(text) + "'");
  // A leading zero would make the big-integer parser read octal.
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    long e = 0;
    const auto* first = text.data() + pos;
    const auto* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, e);
    if (ec != std::errc() || ptr != last) throw InvalidArgument("bad exponent in '" + std::string(text) + "'");
    exponent += e;
    pos = text.size();
  }
  if (pos != text.size()) throw InvalidArgument("trailing characters in '" + std::string(text) + "'");
  if (exponent > 4000 || exponent < -4000) throw InvalidArgument("exponent out of range in '" + std::string(text) + "'");

  BigInt mantissa(digits);
  Rational r;
  if (exponent >= 0) {
    r = Rational(mantissa * pow10(static_cast<unsigned>(exponent)));
  } else {
    r = Rational(mantissa, pow10(static_cast<unsigned>(-exponent)));
  }
  return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw InvalidArgument("empty number");
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_decimal(text.substr(0, slash));
    const Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0) throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
  return parse_decimal(text);
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw NumericError("cannot format double");
  return std::string(buf.data(), ptr);
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw InvalidArgument("non-finite parameter");
  return parse_rational(format_double(value));
}

std::string to_string(const Rational& v) {
  const BigInt num = boost::multiprecision::numerator(v);
  const BigInt den = boost::multiprecision::denominator(v);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational factorial(unsigned n) {
  BigInt r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return Rational(r);
}

double log_factorial(unsigned n) { return std::lgamma(static_cast<double>(n) + 1.0); }

BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

}  // namespace cfp
