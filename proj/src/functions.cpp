#include "avgdiff/functions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <string>

#include "avgdiff/kernels.hpp"

namespace avgdiff {

DomainError::DomainError(FunctionId fn, double x)
    : std::domain_error([&] {
        std::ostringstream os;
        os.precision(17);
        os << std::string(name(fn)) << " is not defined at x = " << x;
        return os.str();
      }()),
      fn_(fn),
      x_(x) {}

NonFiniteEstimate::NonFiniteEstimate(double step, double value)
    : std::runtime_error([&] {
        std::ostringstream os;
        os.precision(17);
        os << "non-finite single-step estimate " << value << " at step h_i = " << step;
        return os.str();
      }()),
      step_(step) {}

std::string_view name(FunctionId fn) {
  switch (fn) {
    case FunctionId::Cos: return "cos";
    case FunctionId::Exp: return "exp";
    case FunctionId::Ln: return "ln";
    case FunctionId::Atan: return "atan";
    case FunctionId::Laguerre7: return "laguerre7";
  }
  return "?";
}

FunctionId parse_function(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "cos") return FunctionId::Cos;
  if (t == "exp") return FunctionId::Exp;
  if (t == "ln" || t == "log") return FunctionId::Ln;
  if (t == "atan" || t == "arctan") return FunctionId::Atan;
  if (t == "laguerre7" || t == "l7") return FunctionId::Laguerre7;
  throw std::invalid_argument("unknown function '" + std::string(text) + "'");
}

bool in_domain(FunctionId fn, double x) noexcept {
  if (std::isnan(x)) return false;
  return fn != FunctionId::Ln || x > 0.0;
}

namespace {

template <std::size_t N>
double horner(const std::array<double, N>& c, double x) {
  double r = c[N - 1];
  for (std::size_t k = N - 1; k-- > 0;) r = r * x + c[k];
  return r;
}

void require_domain(FunctionId fn, double x) {
  if (!in_domain(fn, x)) throw DomainError(fn, x);
}

}  // namespace

double eval(FunctionId fn, double x) {
  require_domain(fn, x);
  switch (fn) {
    case FunctionId::Cos: return std::cos(x);
    case FunctionId::Exp: return std::exp(x);
    case FunctionId::Ln: return std::log(x);
    case FunctionId::Atan: return std::atan(x);
    case FunctionId::Laguerre7: return horner(laguerre7::kValue, x);
  }
  return 0.0;
}

double d1_exact(FunctionId fn, double x) {
  require_domain(fn, x);
  switch (fn) {
    case FunctionId::Cos: return -std::sin(x);
    case FunctionId::Exp: return std::exp(x);
    case FunctionId::Ln: return 1.0 / x;
    case FunctionId::Atan: return 1.0 / (1.0 + x * x);
    case FunctionId::Laguerre7: return horner(laguerre7::kFirst, x);
  }
  return 0.0;
}

double d2_exact(FunctionId fn, double x) {
  require_domain(fn, x);
  switch (fn) {
    case FunctionId::Cos: return -std::cos(x);
    case FunctionId::Exp: return std::exp(x);
    case FunctionId::Ln: return -1.0 / (x * x);
    case FunctionId::Atan: {
      const double q = 1.0 + x * x;
      return -2.0 * x / (q * q);
    }
    case FunctionId::Laguerre7: return horner(laguerre7::kSecond, x);
  }
  return 0.0;
}

FunctionHandle::FunctionHandle(FunctionId fn) : fn_(fn) {}

double FunctionHandle::operator()(double x) const {
  return callable_ ? callable_(x) : eval(fn_, x);
}

void FunctionHandle::eval_batch(std::span<const double> xs, std::span<double> out) const {
  const std::size_t n = xs.size();
  if (callable_) {
    for (std::size_t i = 0; i < n; ++i) out[i] = callable_(xs[i]);
    return;
  }
  for (double x : xs) require_domain(fn_, x);
  switch (fn_) {
    case FunctionId::Cos:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::cos(xs[i]);
      break;
    case FunctionId::Exp:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(xs[i]);
      break;
    case FunctionId::Ln:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::log(xs[i]);
      break;
    case FunctionId::Atan:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::atan(xs[i]);
      break;
    case FunctionId::Laguerre7:
      kernels::active().horner(laguerre7::kValue.data(), laguerre7::kValue.size() - 1, xs.data(),
                               out.data(), n);
      break;
  }
}

namespace {

std::vector<FunctionCase> build_case_table() {
  using F = FunctionId;
  // case, function, x, |f'|, |f''|, printed decimals of each magnitude
  return {
      {1, F::Laguerre7, 9.683, 19.88, 0.0011, 2, 4},
      {2, F::Laguerre7, 11.2345, 0.0031, 28.57, 4, 2},
      {3, F::Laguerre7, 15.83, 265.1, 0.1534, 1, 4},
      {4, F::Laguerre7, 17.65, 1.443, 358.1, 3, 1},
      {5, F::Laguerre7, 15.8285, 265.1, 0.0026, 1, 4},
      {6, F::Laguerre7, 17.64595, 0.0048, 356.8, 4, 1},
      {7, F::Exp, -6.9, 0.0010, 0.0010, 4, 4},
      {8, F::Ln, 10.0, 0.1, 0.01, 1, 2},
      {9, F::Atan, 6.245, 0.0249, 0.0078, 4, 4},
      {10, F::Cos, 1.47, 0.9949, 0.1006, 4, 4},
      {11, F::Cos, 0.1, 0.0998, 0.9950, 4, 4},
      {12, F::Cos, 0.0025, 0.0024, 0.9999, 4, 4},
      {13, F::Atan, 0.002, 0.9999, 0.0039, 4, 4},
      {14, F::Ln, 0.03, 33.33, 1111.1, 2, 1},
      {15, F::Exp, 6.9, 992.2, 992.2, 1, 1},
      {16, F::Ln, 1.0, 1.0, 1.0, 1, 1},
      {17, F::Laguerre7, 9.67477, 19.88, 0.1000, 2, 4},
      {18, F::Laguerre7, 11.2311, 0.1001, 28.49, 4, 2},
      {19, F::Exp, 4.25, 70.10, 70.10, 2, 2},
  };
}

bool matches_display(double computed, double published, int decimals) {
  // One unit of the last printed decimal, plus a hair for the binary representation of both.
  const double unit = std::pow(10.0, -decimals);
  return std::abs(computed - published) <= unit * (1.0 + 1e-9);
}

}  // namespace

const std::vector<FunctionCase>& case_table() {
  static const std::vector<FunctionCase> table = build_case_table();
  return table;
}

const FunctionCase& find_case(int case_id) {
  const auto& t = case_table();
  auto it = std::find_if(t.begin(), t.end(), [&](const FunctionCase& c) { return c.case_id == case_id; });
  if (it == t.end()) throw std::invalid_argument("unknown case id " + std::to_string(case_id));
  return *it;
}

std::vector<CaseCheck> validate_case_table() {
  std::vector<CaseCheck> out;
  out.reserve(case_table().size());
  for (const auto& c : case_table()) {
    const double a1 = std::abs(d1_exact(c.fn, c.x));
    const double a2 = std::abs(d2_exact(c.fn, c.x));
    out.push_back({c.case_id, a1, a2, matches_display(a1, c.abs_d1_published, c.d1_decimals),
                   matches_display(a2, c.abs_d2_published, c.d2_decimals)});
  }
  return out;
}

}  // namespace avgdiff
