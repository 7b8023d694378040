#include "cfp/kernels.hpp"

#include <climits>
#include <cmath>
#include <string>

#include "cfp/errors.hpp"

namespace cfp {

std::string_view to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::constant:
      return "constant";
    case KernelFamily::bounded:
      return "bounded";
    case KernelFamily::linear:
      return "linear";
    case KernelFamily::tabulated:
      return "tabulated";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "constant") return KernelFamily::constant;
  if (name == "bounded") return KernelFamily::bounded;
  if (name == "linear") return KernelFamily::linear;
  if (name == "tabulated") return KernelFamily::tabulated;
  throw InvalidArgument("unknown kernel family '" + std::string(name) + "'");
}

namespace {

void validate_tables(const KernelTables& t) {
  const std::size_t len = t.a.size();
  if (len == 0) throw InvalidArgument("tabulated kernel needs a non-empty weight list");
  for (const auto& w : t.a)
    if (w < 0) throw InvalidArgument("tabulated weights must be non-negative");
  auto check = [&](const std::vector<std::vector<Rational>>& m, const char* name) {
    // Row i (1-based) must reach column len - i.
    if (m.size() + 1 < len) throw InvalidArgument(std::string("tabulated ") + name + " table has too few rows");
    for (std::size_t i = 1; i < len; ++i) {
      if (m[i - 1].size() < len - i)
        throw InvalidArgument(std::string("tabulated ") + name + " table row " + std::to_string(i) + " is incomplete");
      for (std::size_t j = 1; i + j <= len; ++j) {
        if (m[i - 1][j - 1] < 0) throw InvalidArgument(std::string("tabulated ") + name + " rates must be non-negative");
        if (m[i - 1][j - 1] != m[j - 1][i - 1])
          throw InvalidArgument(std::string("tabulated ") + name + " table is not symmetric at (" + std::to_string(i) +
                                "," + std::to_string(j) + ")");
      }
    }
  };
  check(t.coag, "C");
  check(t.frag, "F");
}

}  // namespace

Kernel::Kernel(KernelSpec spec) : spec_(std::move(spec)) {
  if (spec_.family == KernelFamily::tabulated) {
    if (!spec_.tables) throw InvalidArgument("tabulated kernel requires tables");
    validate_tables(*spec_.tables);
  } else {
    if (spec_.a <= 0) throw InvalidArgument("kernel parameter a must be positive");
    if (spec_.family == KernelFamily::bounded) {
      if (!spec_.max_size) throw InvalidArgument("bounded kernel requires M");
      if (*spec_.max_size < 1) throw InvalidArgument("bounded kernel requires M >= 1");
    }
  }
  a_double_ = to_double(spec_.a);
}

Kernel build_kernel(const KernelSpec& spec) { return Kernel(spec); }

std::optional<int> Kernel::max_size() const {
  if (spec_.family == KernelFamily::bounded) return spec_.max_size;
  return std::nullopt;
}

int Kernel::defined_up_to() const {
  if (spec_.family == KernelFamily::tabulated) return static_cast<int>(spec_.tables->a.size());
  return INT_MAX;
}

void Kernel::require_defined(int n) const {
  if (n > defined_up_to())
    throw InvalidArgument("tabulated kernel is only defined up to N = " + std::to_string(defined_up_to()));
}

bool Kernel::unit_coagulation(int n) const {
  switch (spec_.family) {
    case KernelFamily::constant:
    case KernelFamily::linear:
      return true;
    case KernelFamily::bounded:
      return *spec_.max_size >= n;
    case KernelFamily::tabulated:
      for (int i = 1; i < n; ++i)
        for (int j = 1; i + j <= n; ++j)
          if (coag_exact(i, j) != 1) return false;
      return true;
  }
  return false;
}

Rational Kernel::weight_exact(int i) const {
  if (i < 1) return 0;
  switch (spec_.family) {
    case KernelFamily::constant:
      return spec_.a;
    case KernelFamily::bounded:
      return i <= *spec_.max_size ? spec_.a : Rational(0);
    case KernelFamily::linear:
      return spec_.a * i;
    case KernelFamily::tabulated:
      require_defined(i);
      return spec_.tables->a[i - 1];
  }
  return 0;
}

Rational Kernel::coag_exact(int i, int j) const {
  if (i < 1 || j < 1) return 0;
  switch (spec_.family) {
    case KernelFamily::constant:
    case KernelFamily::linear:
      return 1;
    case KernelFamily::bounded:
      return i + j <= *spec_.max_size ? Rational(1) : Rational(0);
    case KernelFamily::tabulated:
      require_defined(i + j);
      return spec_.tables->coag[i - 1][j - 1];
  }
  return 0;
}

Rational Kernel::frag_exact(int i, int j) const {
  if (i < 1 || j < 1) return 0;
  switch (spec_.family) {
    case KernelFamily::constant:
      return spec_.a;
    case KernelFamily::bounded:
      return i + j <= *spec_.max_size ? spec_.a : Rational(0);
    case KernelFamily::linear:
      return spec_.a * i * j / (i + j);
    case KernelFamily::tabulated:
      require_defined(i + j);
      return spec_.tables->frag[i - 1][j - 1];
  }
  return 0;
}

template <>
Rational Kernel::weight<Rational>(int i) const {
  return weight_exact(i);
}
template <>
Rational Kernel::coag<Rational>(int i, int j) const {
  return coag_exact(i, j);
}
template <>
Rational Kernel::frag<Rational>(int i, int j) const {
  return frag_exact(i, j);
}

template <>
double Kernel::weight<double>(int i) const {
  if (i < 1) return 0.0;
  switch (spec_.family) {
    case KernelFamily::constant:
      return a_double_;
    case KernelFamily::bounded:
      return i <= *spec_.max_size ? a_double_ : 0.0;
    case KernelFamily::linear:
      return a_double_ * i;
    case KernelFamily::tabulated:
      return to_double(weight_exact(i));
  }
  return 0.0;
}

template <>
double Kernel::coag<double>(int i, int j) const {
  if (spec_.family == KernelFamily::tabulated) return to_double(coag_exact(i, j));
  if (i < 1 || j < 1) return 0.0;
  if (spec_.family == KernelFamily::bounded) return i + j <= *spec_.max_size ? 1.0 : 0.0;
  return 1.0;
}

template <>
double Kernel::frag<double>(int i, int j) const {
  if (i < 1 || j < 1) return 0.0;
  switch (spec_.family) {
    case KernelFamily::constant:
      return a_double_;
    case KernelFamily::bounded:
      return i + j <= *spec_.max_size ? a_double_ : 0.0;
    case KernelFamily::linear:
      return a_double_ * i * j / (i + j);
    case KernelFamily::tabulated:
      return to_double(frag_exact(i, j));
  }
  return 0.0;
}

template <>
LogReal Kernel::weight<LogReal>(int i) const {
  return LogReal(weight<double>(i));
}
template <>
LogReal Kernel::coag<LogReal>(int i, int j) const {
  return LogReal(coag<double>(i, j));
}
template <>
LogReal Kernel::frag<LogReal>(int i, int j) const {
  return LogReal(frag<double>(i, j));
}

template <class T>
T total_dissociation(const Kernel& kernel, int n) {
  if (n < 1) throw InvalidArgument("cluster size must be >= 1");
  T d = Num<T>::zero();
  for (int i = 1; i < n; ++i) d += kernel.frag<T>(i, n - i);
  return d;
}

template Rational total_dissociation<Rational>(const Kernel&, int);
template double total_dissociation<double>(const Kernel&, int);
template LogReal total_dissociation<LogReal>(const Kernel&, int);

BalanceReport verify_detailed_balance(const Kernel& kernel, int n, double tol, NumericMode mode) {
  if (n < 2) throw InvalidArgument("detailed-balance check needs N >= 2");
  if (tol < 0) throw InvalidArgument("tolerance must be non-negative");
  kernel.require_defined(n);
  BalanceReport report;
  std::pair<int, int> worst{1, 1};
  for (int i = 1; 2 * i <= n; ++i) {
    for (int j = i; i + j <= n; ++j) {
      double violation = 0.0;
      if (mode == NumericMode::exact) {
        const Rational lhs = kernel.coag<Rational>(i, j) * kernel.weight<Rational>(i) * kernel.weight<Rational>(j);
        const Rational rhs = kernel.frag<Rational>(i, j) * kernel.weight<Rational>(i + j);
        const Rational scale = rhs > 1 ? rhs : Rational(1);
        violation = to_double(abs(lhs - rhs) / scale);
      } else {
        const double lhs = kernel.coag(i, j) * kernel.weight(i) * kernel.weight(j);
        const double rhs = kernel.frag(i, j) * kernel.weight(i + j);
        violation = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
      }
      if (violation > report.max_violation) {
        report.max_violation = violation;
        worst = {i, j};
      }
    }
  }
  if (report.max_violation > tol) report.offending_pair = worst;
  return report;
}

}  // namespace cfp
