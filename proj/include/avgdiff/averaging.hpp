#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

#include "avgdiff/diffcore.hpp"

namespace avgdiff {

enum class StepKind { Single, McUniform, Equidistant, LowDiscrepancy };

std::string_view name(StepKind k);

/// How the step multiset {h_i} is drawn from [0.5h, 1.5h].
class StepStrategy {
 public:
  static StepStrategy single();
  static StepStrategy mc_uniform(std::size_t n, std::uint64_t seed);
  /// Throws InvalidStrategy for n < 2.
  static StepStrategy equidistant(std::size_t n);
  static StepStrategy low_discrepancy(std::size_t n);

  StepKind kind() const noexcept { return kind_; }
  std::size_t sample_count() const noexcept { return n_; }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  StepStrategy(StepKind kind, std::size_t n, std::uint64_t seed) : kind_(kind), n_(n), seed_(seed) {}

  StepKind kind_;
  std::size_t n_;
  std::uint64_t seed_;
};

struct StepSequence {
  double base_h = 0.0;
  std::vector<double> steps;
};

StepSequence steps_equidistant(double h, std::size_t n);
StepSequence steps_mc(double h, std::size_t n, std::uint64_t seed);
StepSequence steps_lowdiscrepancy(double h, std::size_t n);
StepSequence make_steps(const StepStrategy& strategy, double h);

struct AveragedResult {
  double mean = 0.0;
  double sample_std = 0.0;
  std::size_t n = 0;
  double predicted_sigma = 0.0;
};

/// Mean of the single-step estimates over the strategy's step multiset.
/// Single returns the base estimator at h exactly.
AveragedResult averaged_derivative(MethodId method, const FunctionHandle& f, double x, double h,
                                   const StepStrategy& strategy,
                                   QuadratureMode qmode = QuadratureMode::CorrectedComposite,
                                   LdiSignMode smode = LdiSignMode::Corrected);

/// Same, over an explicit list of steps.
AveragedResult averaged_over_steps(MethodId method, const FunctionHandle& f, double x,
                                   std::span<const double> steps,
                                   QuadratureMode qmode = QuadratureMode::CorrectedComposite,
                                   LdiSignMode smode = LdiSignMode::Corrected);

/// Single-step estimates for every step, batched through the active kernels.
/// Element i equals estimate(method, f, x, steps[i], ...) bit for bit.
std::vector<double> single_step_estimates(MethodId method, const FunctionHandle& f, double x,
                                          std::span<const double> steps,
                                          QuadratureMode qmode = QuadratureMode::CorrectedComposite,
                                          LdiSignMode smode = LdiSignMode::Corrected);

/// sqrt(sum sigma_i^2) / N for N independent estimates with errors sigma_i.
double predict_error_reduction(std::span<const double> sigmas);

/// Stateless 64-bit mixer (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t v) noexcept;

/// Derives an independent substream seed from a base seed and a list of keys.
std::uint64_t substream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept;

}  // namespace avgdiff
