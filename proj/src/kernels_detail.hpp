#pragma once

// Shared scalar pieces of the kernels. Included by both the scalar and the
// AVX2 translation units so tails and lane combination are literally the same code.

#include <cstddef>

namespace avgdiff::kernels::detail {

inline constexpr std::size_t kLanes = 4;

struct LaneSums {
  double sum[kLanes] = {0.0, 0.0, 0.0, 0.0};
  double comp[kLanes] = {0.0, 0.0, 0.0, 0.0};
};

// Knuth TwoSum: s + e == a + b exactly.
inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

inline void lane_add(LaneSums& acc, std::size_t lane, double x) {
  double s, e;
  two_sum(acc.sum[lane], x, s, e);
  acc.sum[lane] = s;
  acc.comp[lane] = acc.comp[lane] + e;
}

inline double combine(const LaneSums& acc) {
  double total = acc.sum[0];
  double comp = acc.comp[0];
  for (std::size_t l = 1; l < kLanes; ++l) {
    double s, e;
    two_sum(total, acc.sum[l], s, e);
    total = s;
    comp = comp + acc.comp[l];
    comp = comp + e;
  }
  return total + comp;
}

inline double central_difference(double fp, double fm, double h) { return (fp - fm) / (2.0 * h); }

inline double five_point(double fm2, double fm1, double fp1, double fp2, double h) {
  return (((fm2 - 8.0 * fm1) + 8.0 * fp1) - fp2) / (12.0 * h);
}

// Offset of a quadrature node from x, formed from h alone so that it does not
// inherit the rounding of x - h.
inline double lattice_offset(double h, double node, double panels) {
  const double dx = (2.0 * h) / panels;
  return node * dx - h;
}

inline double moment_term(double weight, bool flip, double s, double f) {
  const double d = flip ? -s : s;
  return weight * (d * f);
}

inline double moment_finish(double h, double panels, double acc) {
  const double dx = (2.0 * h) / panels;
  const double integral = ((2.0 * dx) * acc) / 45.0;
  return (3.0 / (2.0 * h * h * h)) * integral;
}

}  // namespace avgdiff::kernels::detail
