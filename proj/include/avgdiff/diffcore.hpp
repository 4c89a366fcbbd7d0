#pragma once

#include <array>
#include <span>
#include <string_view>

#include "avgdiff/functions.hpp"

namespace avgdiff {

enum class MethodId { AFD, RE, LDI };

inline constexpr std::array<MethodId, 3> kAllMethods = {MethodId::AFD, MethodId::RE, MethodId::LDI};

std::string_view name(MethodId m);
/// "afd", "re", "ldi" (case-insensitive).
MethodId parse_method(std::string_view text);

/// Weights for the LDI moment integral.
///   PaperVerbatim      - the printed 16-node rule (weights sum to 328, not 337.5).
///   CorrectedComposite - 17-node, four-panel composite Boole rule.
enum class QuadratureMode { PaperVerbatim, CorrectedComposite };

/// Corrected integrates (t - x) f(t); PaperVerbatim integrates (x - t) f(t), which yields -f'.
enum class LdiSignMode { Corrected, PaperVerbatim };

std::string_view name(QuadratureMode q);
std::string_view name(LdiSignMode s);

/// Node weights in units of 2*dx/45, node 0 at the left endpoint.
std::span<const double> boole_weights(QuadratureMode mode);

/// Number of intervals between the first and last node (15 or 16).
std::size_t boole_panels(QuadratureMode mode);

/// Central difference (f(x+h) - f(x-h)) / (2h).
double afd(const FunctionHandle& f, double x, double h);

/// Five-point rule (f(x-2h) - 8f(x-h) + 8f(x+h) - f(x+2h)) / (12h).
double richardson5(const FunctionHandle& f, double x, double h);

/// Weighted sum over equidistant nodes x_j = a + j*dx, scaled by 2*dx/45.
double boole16(const FunctionHandle& f, double a, double b, QuadratureMode mode);

/// Lanczos derivative: 3/(2h^3) times the moment integral of f over [x-h, x+h],
/// integrated with boole16's weights at nodes x + s_j, s_j = j*dx - h.
double ldi(const FunctionHandle& f, double x, double h,
           QuadratureMode qmode = QuadratureMode::CorrectedComposite,
           LdiSignMode smode = LdiSignMode::Corrected);

/// Dispatches to afd / richardson5 / ldi.
double estimate(MethodId method, const FunctionHandle& f, double x, double h,
                QuadratureMode qmode = QuadratureMode::CorrectedComposite,
                LdiSignMode smode = LdiSignMode::Corrected);

/// Farthest offset from x the estimator evaluates at, in units of h.
double stencil_reach(MethodId method) noexcept;

}  // namespace avgdiff
