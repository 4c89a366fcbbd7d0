#include "avgdiff/diffcore.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>

namespace avgdiff {

std::string_view name(MethodId m) {
  switch (m) {
    case MethodId::AFD: return "AFD";
    case MethodId::RE: return "RE";
    case MethodId::LDI: return "LDI";
  }
  return "?";
}

MethodId parse_method(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "afd") return MethodId::AFD;
  if (t == "re") return MethodId::RE;
  if (t == "ldi") return MethodId::LDI;
  throw std::invalid_argument("unknown method '" + std::string(text) + "'");
}

std::string_view name(QuadratureMode q) {
  return q == QuadratureMode::PaperVerbatim ? "paper" : "corrected";
}

std::string_view name(LdiSignMode s) {
  return s == LdiSignMode::PaperVerbatim ? "paper" : "corrected";
}

namespace {

// As printed: I1 = 7 at both ends, I2 = 32 at odd nodes 3..15, I3 = 14 at
// nodes 4, 8, 12, I4 = 12 at nodes 2, 6, 10, 14 (1-based).
constexpr std::array<double, 16> kPaperWeights = {7, 12, 32, 14, 32, 12, 32, 14,
                                                  32, 12, 32, 14, 32, 12, 32, 7};

// Four Boole panels sharing endpoints.
constexpr std::array<double, 17> kCompositeWeights = {7, 32, 12, 32, 14, 32, 12, 32, 14,
                                                      32, 12, 32, 14, 32, 12, 32, 7};

void require_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw InvalidStep("step must be positive and finite, got " + std::to_string(h));
}

}  // namespace

std::span<const double> boole_weights(QuadratureMode mode) {
  if (mode == QuadratureMode::PaperVerbatim) return kPaperWeights;
  return kCompositeWeights;
}

std::size_t boole_panels(QuadratureMode mode) { return boole_weights(mode).size() - 1; }

double afd(const FunctionHandle& f, double x, double h) {
  require_step(h);
  const double fp = f(x + h);
  const double fm = f(x - h);
  return (fp - fm) / (2.0 * h);
}

double richardson5(const FunctionHandle& f, double x, double h) {
  require_step(h);
  const double fm2 = f(x - 2.0 * h);
  const double fm1 = f(x - h);
  const double fp1 = f(x + h);
  const double fp2 = f(x + 2.0 * h);
  return (((fm2 - 8.0 * fm1) + 8.0 * fp1) - fp2) / (12.0 * h);
}

double boole16(const FunctionHandle& f, double a, double b, QuadratureMode mode) {
  if (!(a < b)) throw InvalidInterval("quadrature needs a < b");
  const auto w = boole_weights(mode);
  const double dx = (b - a) / static_cast<double>(w.size() - 1);
  double acc = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double t = a + static_cast<double>(j) * dx;
    acc = acc + w[j] * f(t);
  }
  return ((2.0 * dx) * acc) / 45.0;
}

double ldi(const FunctionHandle& f, double x, double h, QuadratureMode qmode, LdiSignMode smode) {
  require_step(h);
  const bool flip = smode == LdiSignMode::PaperVerbatim;
  const auto w = boole_weights(qmode);
  const double panels = static_cast<double>(w.size() - 1);
  // Same node lattice as boole16 on [x - h, x + h], but the moment factor t - x
  // is the offset itself rather than a difference of two rounded numbers.
  const double dx = (2.0 * h) / panels;
  double acc = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double s = static_cast<double>(j) * dx - h;
    const double d = flip ? -s : s;
    acc = acc + w[j] * (d * f(x + s));
  }
  const double integral = ((2.0 * dx) * acc) / 45.0;
  return (3.0 / (2.0 * h * h * h)) * integral;
}

double estimate(MethodId method, const FunctionHandle& f, double x, double h, QuadratureMode qmode,
                LdiSignMode smode) {
  switch (method) {
    case MethodId::AFD: return afd(f, x, h);
    case MethodId::RE: return richardson5(f, x, h);
    case MethodId::LDI: return ldi(f, x, h, qmode, smode);
  }
  return 0.0;
}

double stencil_reach(MethodId method) noexcept { return method == MethodId::RE ? 2.0 : 1.0; }

}  // namespace avgdiff
