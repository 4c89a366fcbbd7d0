#include "avgdiff/kernels.hpp"
#include "kernels_detail.hpp"

namespace avgdiff::kernels {
namespace {

using detail::kLanes;

double compensated_sum(const double* v, std::size_t n) {
  detail::LaneSums acc;
  for (std::size_t i = 0; i < n; ++i) detail::lane_add(acc, i % kLanes, v[i]);
  return detail::combine(acc);
}

double sum_squared_deviation(const double* v, std::size_t n, double center) {
  detail::LaneSums acc;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = v[i] - center;
    detail::lane_add(acc, i % kLanes, d * d);
  }
  return detail::combine(acc);
}

void central_difference(const double* fp, const double* fm, const double* h, double* out,
                        std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = detail::central_difference(fp[i], fm[i], h[i]);
}

void five_point(const double* fm2, const double* fm1, const double* fp1, const double* fp2,
                const double* h, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = detail::five_point(fm2[i], fm1[i], fp1[i], fp2[i], h[i]);
}

void horner(const double* coeffs, std::size_t degree, const double* x, double* out,
            std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double r = coeffs[degree];
    for (std::size_t k = degree; k-- > 0;) r = r * x[i] + coeffs[k];
    out[i] = r;
  }
}

void lattice_nodes(double x, const double* h, std::size_t node, std::size_t panels, double* s,
                   double* t, std::size_t n) {
  const double j = static_cast<double>(node);
  const double p = static_cast<double>(panels);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = detail::lattice_offset(h[i], j, p);
    t[i] = x + s[i];
  }
}

void moment_accumulate(double weight, bool flip, const double* s, const double* f, double* acc,
                       std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = acc[i] + detail::moment_term(weight, flip, s[i], f[i]);
}

void moment_finish(const double* h, std::size_t panels, const double* acc, double* out,
                   std::size_t n) {
  const double p = static_cast<double>(panels);
  for (std::size_t i = 0; i < n; ++i) out[i] = detail::moment_finish(h[i], p, acc[i]);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::Scalar,      compensated_sum, sum_squared_deviation,
                                 central_difference, five_point,    horner,
                                 lattice_nodes,    moment_accumulate, moment_finish};
  return table;
}

}  // namespace avgdiff::kernels
