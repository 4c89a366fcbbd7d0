#pragma once

// Data-parallel inner loops of the averaging method.
//
// Every kernel has a scalar reference and (on x86-64) an AVX2 variant. The
// variants perform the same IEEE operations in the same order per element, and
// the reductions use a fixed 4-lane layout in both, so results are
// bit-identical across ISAs. The build disables FMA contraction to keep it so.

#include <cstddef>
#include <span>
#include <string_view>

namespace avgdiff::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view name(Isa isa);

struct KernelTable {
  Isa isa;

  /// Sum with per-lane error-free TwoSum compensation over 4 interleaved lanes.
  double (*compensated_sum)(const double* v, std::size_t n);

  /// Compensated sum of (v[i] - center)^2, same lane layout.
  double (*sum_squared_deviation)(const double* v, std::size_t n, double center);

  /// out[i] = (fp[i] - fm[i]) / (2 * h[i])
  void (*central_difference)(const double* fp, const double* fm, const double* h, double* out,
                             std::size_t n);

  /// out[i] = (((fm2 - 8*fm1) + 8*fp1) - fp2) / (12 * h)
  void (*five_point)(const double* fm2, const double* fm1, const double* fp1, const double* fp2,
                     const double* h, double* out, std::size_t n);

  /// Horner evaluation; coeffs lowest degree first.
  void (*horner)(const double* coeffs, std::size_t degree, const double* x, double* out,
                 std::size_t n);

  /// s[i] = node * (2 h[i] / panels) - h[i], t[i] = x + s[i]
  void (*lattice_nodes)(double x, const double* h, std::size_t node, std::size_t panels,
                        double* s, double* t, std::size_t n);

  /// acc[i] += weight * (d * f[i]) with d = s[i], or -s[i] when flip is set.
  void (*moment_accumulate)(double weight, bool flip, const double* s, const double* f,
                            double* acc, std::size_t n);

  /// out[i] = (3 / (2 h^3)) * ((2 * dx) * acc / 45), dx = 2 h / panels
  void (*moment_finish)(const double* h, std::size_t panels, const double* acc, double* out,
                        std::size_t n);
};

const KernelTable& scalar_table();

/// nullptr when the AVX2 path was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_table();

/// The table used by the library. Chosen on first use: AVX2 if available,
/// unless AVGDIFF_ISA=scalar is set in the environment.
const KernelTable& active();

/// Overrides the dispatch choice. Returns false if the ISA is unavailable.
bool select(Isa isa);

}  // namespace avgdiff::kernels
