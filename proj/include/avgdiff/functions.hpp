#pragma once

#include <array>
#include <functional>
#include <span>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "avgdiff/errors.hpp"

namespace avgdiff {

enum class FunctionId { Cos, Exp, Ln, Atan, Laguerre7 };

inline constexpr std::array<FunctionId, 5> kAllFunctions = {
    FunctionId::Cos, FunctionId::Exp, FunctionId::Ln, FunctionId::Atan, FunctionId::Laguerre7};

std::string_view name(FunctionId fn);
/// Accepts "cos", "exp", "ln", "atan", "laguerre7" (also "l7"). Throws std::invalid_argument.
FunctionId parse_function(std::string_view text);

bool in_domain(FunctionId fn, double x) noexcept;

double eval(FunctionId fn, double x);
double d1_exact(FunctionId fn, double x);
double d2_exact(FunctionId fn, double x);

namespace laguerre7 {
// Power-basis coefficients, lowest degree first. L7(0) = 1 normalization.
inline constexpr std::array<double, 8> kValue = {
    1.0, -7.0, 21.0 / 2.0, -35.0 / 6.0, 35.0 / 24.0, -7.0 / 40.0, 7.0 / 720.0, -1.0 / 5040.0};
inline constexpr std::array<double, 7> kFirst = {
    -7.0, 21.0, -35.0 / 2.0, 35.0 / 6.0, -7.0 / 8.0, 7.0 / 120.0, -1.0 / 720.0};
inline constexpr std::array<double, 6> kSecond = {
    21.0, -35.0, 35.0 / 2.0, -7.0 / 2.0, 7.0 / 24.0, -1.0 / 120.0};
}  // namespace laguerre7

/// Real-to-real evaluator accepted by every estimator. Either one of the
/// registered functions (with a vectorized batch path) or an arbitrary pure
/// callable.
class FunctionHandle {
 public:
  FunctionHandle(FunctionId fn);  // NOLINT(google-explicit-constructor)

  template <class F>
    requires std::is_invocable_r_v<double, F, double> &&
             (!std::is_same_v<std::remove_cvref_t<F>, FunctionHandle>) &&
             (!std::is_same_v<std::remove_cvref_t<F>, FunctionId>)
  FunctionHandle(F&& f)  // NOLINT(google-explicit-constructor)
      : callable_(std::forward<F>(f)) {}

  double operator()(double x) const;

  /// out[i] = f(xs[i]). Same values as calling operator() element-wise.
  void eval_batch(std::span<const double> xs, std::span<double> out) const;

  bool is_registered() const noexcept { return !callable_; }
  FunctionId id() const noexcept { return fn_; }

 private:
  FunctionId fn_ = FunctionId::Cos;
  std::function<double(double)> callable_;
};

struct FunctionCase {
  int case_id;
  FunctionId fn;
  double x;
  double abs_d1_published;
  double abs_d2_published;
  // Number of decimals printed for each magnitude; drives the comparison tolerance.
  int d1_decimals;
  int d2_decimals;
};

/// The 19 benchmark cases, in table order.
const std::vector<FunctionCase>& case_table();
const FunctionCase& find_case(int case_id);

struct CaseCheck {
  int case_id;
  double abs_d1;
  double abs_d2;
  bool d1_ok;
  bool d2_ok;
  bool pass() const noexcept { return d1_ok && d2_ok; }
};

/// Recomputes |f'| and |f''| for every case and compares with the printed
/// magnitudes to within one unit of the last printed decimal.
std::vector<CaseCheck> validate_case_table();

}  // namespace avgdiff
