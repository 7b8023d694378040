#ifndef CFP_KERNELS_HPP
#define CFP_KERNELS_HPP

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cfp/numeric.hpp"

namespace cfp {

enum class KernelFamily { constant, bounded, linear, tabulated };

std::string_view to_string(KernelFamily f);
KernelFamily parse_kernel_family(std::string_view name);

/// Explicit weights and rate tables, 1-based in meaning: a[i-1] = a_i,
/// coag[i-1][j-1] = C(i,j). Row i must cover every j with i + j <= size().
struct KernelTables {
  std::vector<Rational> a;
  std::vector<std::vector<Rational>> coag;
  std::vector<std::vector<Rational>> frag;
};

struct KernelSpec {
  KernelFamily family = KernelFamily::constant;
  Rational a = 1;
  std::optional<int> max_size;
  std::optional<KernelTables> tables;

  static KernelSpec constant(Rational a) { return {KernelFamily::constant, std::move(a), std::nullopt, std::nullopt}; }
  static KernelSpec bounded(Rational a, int m) { return {KernelFamily::bounded, std::move(a), m, std::nullopt}; }
  static KernelSpec linear(Rational a) { return {KernelFamily::linear, std::move(a), std::nullopt, std::nullopt}; }
  static KernelSpec tabulated(KernelTables t) {
    return {KernelFamily::tabulated, Rational(1), std::nullopt, std::move(t)};
  }
};

/// Coagulation/fragmentation kernel satisfying C(i,j) a_i a_j = F(i,j) a_{i+j}.
///
///   constant   a_i = a,                C = 1, F = a
///   bounded    a_i = a for i <= M,     C = 1 if i+j <= M else 0, F = a if i+j <= M else 0
///   linear     a_i = a i,              C = 1, F = a i j / (i + j)
///   tabulated  as given
///
/// Every accessor is available exactly (Rational) or as double/LogReal via
/// the template parameter. Immutable after construction.
class Kernel {
 public:
  Kernel() : Kernel(KernelSpec::constant(1)) {}
  explicit Kernel(KernelSpec spec);

  const KernelSpec& spec() const { return spec_; }
  KernelFamily family() const { return spec_.family; }
  const Rational& a() const { return spec_.a; }

  /// Sizes above M carry zero weight (bounded family only).
  std::optional<int> max_size() const;
  /// Largest N for which the kernel is defined; tabulated kernels stop at
  /// their table length.
  int defined_up_to() const;
  /// True when C(i,j) = 1 for every pair with i + j <= N.
  bool unit_coagulation(int n) const;

  template <class T = double>
  T weight(int i) const;
  template <class T = double>
  T coag(int i, int j) const;
  template <class T = double>
  T frag(int i, int j) const;

  /// Throws InvalidArgument if N exceeds defined_up_to().
  void require_defined(int n) const;

 private:
  Rational weight_exact(int i) const;
  Rational coag_exact(int i, int j) const;
  Rational frag_exact(int i, int j) const;

  KernelSpec spec_;
  double a_double_ = 1.0;
};

template <> Rational Kernel::weight<Rational>(int) const;
template <> Rational Kernel::coag<Rational>(int, int) const;
template <> Rational Kernel::frag<Rational>(int, int) const;
template <> double Kernel::weight<double>(int) const;
template <> double Kernel::coag<double>(int, int) const;
template <> double Kernel::frag<double>(int, int) const;
template <> LogReal Kernel::weight<LogReal>(int) const;
template <> LogReal Kernel::coag<LogReal>(int, int) const;
template <> LogReal Kernel::frag<LogReal>(int, int) const;

/// Validates the spec and constructs the kernel.
Kernel build_kernel(const KernelSpec& spec);

struct BalanceReport {
  double max_violation = 0.0;
  /// Worst pair (i <= j) when max_violation exceeds the tolerance.
  std::optional<std::pair<int, int>> offending_pair;
};

/// Worst relative violation |C a_i a_j - F a_{i+j}| / max(1, |F a_{i+j}|)
/// over 1 <= i <= j, i + j <= N. Exact mode evaluates in rationals.
BalanceReport verify_detailed_balance(const Kernel& kernel, int n, double tol = 1e-12,
                                      NumericMode mode = NumericMode::floating);

/// d(n) = sum_{i=1}^{n-1} F(i, n-i), ordered splits; d(1) = 0.
template <class T = double>
T total_dissociation(const Kernel& kernel, int n);

}  // namespace cfp

#endif  // CFP_KERNELS_HPP
