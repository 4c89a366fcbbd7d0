// Compiled with -mavx2 (see src/CMakeLists.txt). Only reached after a runtime CPU check.

#include <immintrin.h>

#include "avgdiff/kernels.hpp"
#include "kernels_detail.hpp"

namespace avgdiff::kernels {
namespace {

using detail::kLanes;

struct VecSums {
  __m256d sum = _mm256_setzero_pd();
  __m256d comp = _mm256_setzero_pd();

  void add(__m256d x) {
    const __m256d s = _mm256_add_pd(sum, x);
    const __m256d bb = _mm256_sub_pd(s, sum);
    const __m256d e = _mm256_add_pd(_mm256_sub_pd(sum, _mm256_sub_pd(s, bb)), _mm256_sub_pd(x, bb));
    sum = s;
    comp = _mm256_add_pd(comp, e);
  }

  detail::LaneSums spill() const {
    detail::LaneSums out;
    _mm256_storeu_pd(out.sum, sum);
    _mm256_storeu_pd(out.comp, comp);
    return out;
  }
};

double compensated_sum(const double* v, std::size_t n) {
  VecSums acc;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) acc.add(_mm256_loadu_pd(v + i));
  detail::LaneSums lanes = acc.spill();
  for (; i < n; ++i) detail::lane_add(lanes, i % kLanes, v[i]);
  return detail::combine(lanes);
}

double sum_squared_deviation(const double* v, std::size_t n, double center) {
  VecSums acc;
  const __m256d c = _mm256_set1_pd(center);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(v + i), c);
    acc.add(_mm256_mul_pd(d, d));
  }
  detail::LaneSums lanes = acc.spill();
  for (; i < n; ++i) {
    const double d = v[i] - center;
    detail::lane_add(lanes, i % kLanes, d * d);
  }
  return detail::combine(lanes);
}

void central_difference(const double* fp, const double* fm, const double* h, double* out,
                        std::size_t n) {
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d num = _mm256_sub_pd(_mm256_loadu_pd(fp + i), _mm256_loadu_pd(fm + i));
    const __m256d den = _mm256_mul_pd(two, _mm256_loadu_pd(h + i));
    _mm256_storeu_pd(out + i, _mm256_div_pd(num, den));
  }
  for (; i < n; ++i) out[i] = detail::central_difference(fp[i], fm[i], h[i]);
}

void five_point(const double* fm2, const double* fm1, const double* fp1, const double* fp2,
                const double* h, double* out, std::size_t n) {
  const __m256d eight = _mm256_set1_pd(8.0);
  const __m256d twelve = _mm256_set1_pd(12.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d num = _mm256_sub_pd(_mm256_loadu_pd(fm2 + i), _mm256_mul_pd(eight, _mm256_loadu_pd(fm1 + i)));
    num = _mm256_add_pd(num, _mm256_mul_pd(eight, _mm256_loadu_pd(fp1 + i)));
    num = _mm256_sub_pd(num, _mm256_loadu_pd(fp2 + i));
    const __m256d den = _mm256_mul_pd(twelve, _mm256_loadu_pd(h + i));
    _mm256_storeu_pd(out + i, _mm256_div_pd(num, den));
  }
  for (; i < n; ++i) out[i] = detail::five_point(fm2[i], fm1[i], fp1[i], fp2[i], h[i]);
}

void horner(const double* coeffs, std::size_t degree, const double* x, double* out,
            std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    __m256d r = _mm256_set1_pd(coeffs[degree]);
    for (std::size_t k = degree; k-- > 0;)
      r = _mm256_add_pd(_mm256_mul_pd(r, xv), _mm256_set1_pd(coeffs[k]));
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) {
    double r = coeffs[degree];
    for (std::size_t k = degree; k-- > 0;) r = r * x[i] + coeffs[k];
    out[i] = r;
  }
}

void lattice_nodes(double x, const double* h, std::size_t node, std::size_t panels, double* s,
                   double* t, std::size_t n) {
  const double j = static_cast<double>(node);
  const double p = static_cast<double>(panels);
  const __m256d xv = _mm256_set1_pd(x);
  const __m256d jv = _mm256_set1_pd(j);
  const __m256d pv = _mm256_set1_pd(p);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d hv = _mm256_loadu_pd(h + i);
    const __m256d dx = _mm256_div_pd(_mm256_mul_pd(two, hv), pv);
    const __m256d sv = _mm256_sub_pd(_mm256_mul_pd(jv, dx), hv);
    _mm256_storeu_pd(s + i, sv);
    _mm256_storeu_pd(t + i, _mm256_add_pd(xv, sv));
  }
  for (; i < n; ++i) {
    s[i] = detail::lattice_offset(h[i], j, p);
    t[i] = x + s[i];
  }
}

void moment_accumulate(double weight, bool flip, const double* s, const double* f, double* acc,
                       std::size_t n) {
  const __m256d wv = _mm256_set1_pd(weight);
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d sv = _mm256_loadu_pd(s + i);
    const __m256d d = flip ? _mm256_xor_pd(sv, sign) : sv;
    const __m256d term = _mm256_mul_pd(wv, _mm256_mul_pd(d, _mm256_loadu_pd(f + i)));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), term));
  }
  for (; i < n; ++i) acc[i] = acc[i] + detail::moment_term(weight, flip, s[i], f[i]);
}

void moment_finish(const double* h, std::size_t panels, const double* acc, double* out,
                   std::size_t n) {
  const double p = static_cast<double>(panels);
  const __m256d pv = _mm256_set1_pd(p);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d three = _mm256_set1_pd(3.0);
  const __m256d fortyfive = _mm256_set1_pd(45.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d hv = _mm256_loadu_pd(h + i);
    const __m256d dx = _mm256_div_pd(_mm256_mul_pd(two, hv), pv);
    const __m256d integral = _mm256_div_pd(_mm256_mul_pd(_mm256_mul_pd(two, dx), _mm256_loadu_pd(acc + i)), fortyfive);
    const __m256d h3 = _mm256_mul_pd(_mm256_mul_pd(_mm256_mul_pd(two, hv), hv), hv);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_div_pd(three, h3), integral));
  }
  for (; i < n; ++i) out[i] = detail::moment_finish(h[i], p, acc[i]);
}

}  // namespace

const KernelTable* avx2_kernels_unchecked() {
  static const KernelTable table{Isa::Avx2,        compensated_sum, sum_squared_deviation,
                                 central_difference, five_point,    horner,
                                 lattice_nodes,    moment_accumulate, moment_finish};
  return &table;
}

}  // namespace avgdiff::kernels
