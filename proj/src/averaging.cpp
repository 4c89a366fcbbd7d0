#include "avgdiff/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "avgdiff/kernels.hpp"

namespace avgdiff {

std::string_view name(StepKind k) {
  switch (k) {
    case StepKind::Single: return "single";
    case StepKind::McUniform: return "mc";
    case StepKind::Equidistant: return "ed";
    case StepKind::LowDiscrepancy: return "lds";
  }
  return "?";
}

StepStrategy StepStrategy::single() { return {StepKind::Single, 1, 0}; }

StepStrategy StepStrategy::mc_uniform(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InvalidStrategy("Monte Carlo averaging needs at least one sample");
  return {StepKind::McUniform, n, seed};
}

StepStrategy StepStrategy::equidistant(std::size_t n) {
  if (n < 2) throw InvalidStrategy("equidistant steps need n >= 2 (0.5h and 1.5h are both samples)");
  return {StepKind::Equidistant, n, 0};
}

StepStrategy StepStrategy::low_discrepancy(std::size_t n) {
  if (n < 1) throw InvalidStrategy("low-discrepancy averaging needs at least one sample");
  return {StepKind::LowDiscrepancy, n, 0};
}

namespace {

void require_base_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw InvalidStep("base step must be positive and finite, got " + std::to_string(h));
}

// 53 random bits -> [0, 1).
double unit_interval(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace

StepSequence steps_equidistant(double h, std::size_t n) {
  require_base_step(h);
  if (n < 2) throw InvalidStrategy("equidistant steps need n >= 2");
  StepSequence seq{h, std::vector<double>(n)};
  const double lo = 0.5 * h;
  const double hi = 1.5 * h;
  const double spacing = h / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    seq.steps[i] = std::clamp(lo + static_cast<double>(i) * spacing, lo, hi);
  seq.steps.back() = hi;
  return seq;
}

StepSequence steps_mc(double h, std::size_t n, std::uint64_t seed) {
  require_base_step(h);
  StepSequence seq{h, std::vector<double>(n)};
  std::mt19937_64 engine(seed);
  const double lo = 0.5 * h;
  for (auto& s : seq.steps) s = lo + h * unit_interval(engine());
  return seq;
}

StepSequence steps_lowdiscrepancy(double h, std::size_t n) {
  require_base_step(h);
  // frac(k / phi) in 64-bit fixed point: k * round(2^64 / phi) mod 2^64.
  constexpr std::uint64_t kInverseGolden = 0x9E3779B97F4A7C15ULL;
  StepSequence seq{h, std::vector<double>(n)};
  const double lo = 0.5 * h;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t frac = static_cast<std::uint64_t>(i + 1) * kInverseGolden;
    seq.steps[i] = lo + h * unit_interval(frac);
  }
  return seq;
}

StepSequence make_steps(const StepStrategy& strategy, double h) {
  switch (strategy.kind()) {
    case StepKind::Single:
      require_base_step(h);
      return {h, {h}};
    case StepKind::McUniform: return steps_mc(h, strategy.sample_count(), strategy.seed());
    case StepKind::Equidistant: return steps_equidistant(h, strategy.sample_count());
    case StepKind::LowDiscrepancy: return steps_lowdiscrepancy(h, strategy.sample_count());
  }
  return {};
}

std::vector<double> single_step_estimates(MethodId method, const FunctionHandle& f, double x,
                                          std::span<const double> steps, QuadratureMode qmode,
                                          LdiSignMode smode) {
  for (double h : steps) require_base_step(h);
  const auto& k = kernels::active();
  const std::size_t n = steps.size();
  std::vector<double> out(n);

  constexpr std::size_t kBlock = 1024;
  std::vector<double> a(kBlock), b(kBlock), c(kBlock), d(kBlock);
  std::vector<double> fa(kBlock), fb(kBlock), fc(kBlock), fd(kBlock);

  for (std::size_t start = 0; start < n; start += kBlock) {
    const std::size_t m = std::min(kBlock, n - start);
    const double* h = steps.data() + start;
    double* dst = out.data() + start;
    auto span_of = [m](std::vector<double>& v) { return std::span<double>(v.data(), m); };

    switch (method) {
      case MethodId::AFD:
        for (std::size_t i = 0; i < m; ++i) {
          a[i] = x + h[i];
          b[i] = x - h[i];
        }
        f.eval_batch(span_of(a), span_of(fa));
        f.eval_batch(span_of(b), span_of(fb));
        k.central_difference(fa.data(), fb.data(), h, dst, m);
        break;
      case MethodId::RE:
        for (std::size_t i = 0; i < m; ++i) {
          a[i] = x - 2.0 * h[i];
          b[i] = x - h[i];
          c[i] = x + h[i];
          d[i] = x + 2.0 * h[i];
        }
        f.eval_batch(span_of(a), span_of(fa));
        f.eval_batch(span_of(b), span_of(fb));
        f.eval_batch(span_of(c), span_of(fc));
        f.eval_batch(span_of(d), span_of(fd));
        k.five_point(fa.data(), fb.data(), fc.data(), fd.data(), h, dst, m);
        break;
      case MethodId::LDI: {
        const auto w = boole_weights(qmode);
        const std::size_t panels = w.size() - 1;
        const bool flip = smode == LdiSignMode::PaperVerbatim;
        std::fill_n(c.begin(), m, 0.0);  // moment accumulator
        for (std::size_t j = 0; j < w.size(); ++j) {
          k.lattice_nodes(x, h, j, panels, b.data(), a.data(), m);
          f.eval_batch(span_of(a), span_of(fa));
          k.moment_accumulate(w[j], flip, b.data(), fa.data(), c.data(), m);
        }
        k.moment_finish(h, panels, c.data(), dst, m);
        break;
      }
    }
  }
  return out;
}

AveragedResult averaged_over_steps(MethodId method, const FunctionHandle& f, double x,
                                   std::span<const double> steps, QuadratureMode qmode,
                                   LdiSignMode smode) {
  if (steps.empty()) throw InvalidStrategy("cannot average over an empty step list");
  const auto est = single_step_estimates(method, f, x, steps, qmode, smode);
  for (std::size_t i = 0; i < est.size(); ++i)
    if (!std::isfinite(est[i])) throw NonFiniteEstimate(steps[i], est[i]);

  const auto& k = kernels::active();
  const std::size_t n = est.size();
  AveragedResult r;
  r.n = n;
  r.mean = k.compensated_sum(est.data(), n) / static_cast<double>(n);
  if (n > 1) {
    const double ss = k.sum_squared_deviation(est.data(), n, r.mean);
    r.sample_std = std::sqrt(ss / static_cast<double>(n - 1));
  }
  r.predicted_sigma = r.sample_std / std::sqrt(static_cast<double>(n));
  return r;
}

AveragedResult averaged_derivative(MethodId method, const FunctionHandle& f, double x, double h,
                                   const StepStrategy& strategy, QuadratureMode qmode,
                                   LdiSignMode smode) {
  require_base_step(h);
  if (strategy.kind() == StepKind::Single) {
    const double v = estimate(method, f, x, h, qmode, smode);
    if (!std::isfinite(v)) throw NonFiniteEstimate(h, v);
    return {v, 0.0, 1, 0.0};
  }
  const auto seq = make_steps(strategy, h);
  return averaged_over_steps(method, f, x, seq.steps, qmode, smode);
}

double predict_error_reduction(std::span<const double> sigmas) {
  if (sigmas.empty()) throw std::invalid_argument("error-reduction prediction needs at least one sigma");
  double ss = 0.0;
  for (double s : sigmas) {
    if (!(s >= 0.0)) throw std::invalid_argument("sigma must be non-negative");
    ss += s * s;
  }
  return std::sqrt(ss) / static_cast<double>(sigmas.size());
}

std::uint64_t mix64(std::uint64_t v) noexcept {
  v += 0x9E3779B97F4A7C15ULL;
  v = (v ^ (v >> 30)) * 0xBF58476D1CE4E5B9ULL;
  v = (v ^ (v >> 27)) * 0x94D049BB133111EBULL;
  return v ^ (v >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t s = mix64(seed);
  for (std::uint64_t k : keys) s = mix64(s ^ mix64(k));
  return s;
}

}  // namespace avgdiff
