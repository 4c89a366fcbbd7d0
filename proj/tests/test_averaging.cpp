#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "avgdiff/averaging.hpp"

using namespace avgdiff;

namespace {

const FunctionHandle kCos(FunctionId::Cos);

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Ratio of the median single-step error to the error of the N-mean.
double reduction_ratio(std::size_t n, std::uint64_t seed) {
  const double x = 1.47, h = 1e-7;
  const double truth = -std::sin(x);
  const auto seq = steps_mc(h, n, seed);
  const auto est = single_step_estimates(MethodId::AFD, kCos, x, seq.steps);
  std::vector<double> err(est.size());
  for (std::size_t i = 0; i < est.size(); ++i) err[i] = std::abs(est[i] - truth);
  const auto avg = averaged_over_steps(MethodId::AFD, kCos, x, seq.steps);
  return median(err) / std::abs(avg.mean - truth);
}

}  // namespace

TEST_CASE("equidistant steps") {
  auto s3 = steps_equidistant(1e-3, 3).steps;
  REQUIRE(s3.size() == 3);
  CHECK(s3[0] == 5.0e-4);
  CHECK(s3[1] == doctest::Approx(1.0e-3).epsilon(1e-15));
  CHECK(s3[2] == 1.5e-3);

  auto s2 = steps_equidistant(1e-3, 2).steps;
  CHECK(s2 == std::vector<double>{5.0e-4, 1.5e-3});

  CHECK(steps_equidistant(2.0, 5).steps == std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0});

  CHECK_THROWS_AS(steps_equidistant(1e-3, 1), InvalidStrategy);
  CHECK_THROWS_AS(StepStrategy::equidistant(1), InvalidStrategy);
  CHECK_THROWS_AS(steps_equidistant(0.0, 4), InvalidStep);
}

TEST_CASE("Monte Carlo steps") {
  const auto a = steps_mc(1e-3, 10'000, 5).steps;
  CHECK(a.size() == 10'000);
  for (double s : a) {
    CHECK(s >= 5e-4);
    CHECK(s <= 1.5e-3);
  }
  CHECK(a == steps_mc(1e-3, 10'000, 5).steps);
  CHECK(a != steps_mc(1e-3, 10'000, 6).steps);

  const std::size_t n = 100'000;
  for (std::uint64_t seed : {1ULL, 2ULL, 0xDEADBEEFULL}) {
    const auto b = steps_mc(1e-3, n, seed).steps;
    const double mean = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
    CHECK(std::abs(mean - 1e-3) <= 3 * (1e-3 / std::sqrt(12.0)) / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("low-discrepancy steps") {
  const auto one = steps_lowdiscrepancy(1.0, 1).steps;
  REQUIRE(one.size() == 1);
  CHECK(one[0] == doctest::Approx(1.1180339887498949).epsilon(1e-15));

  const std::size_t n = 1000;
  auto s = steps_lowdiscrepancy(1.0, n).steps;
  for (double v : s) {
    CHECK(v >= 0.5);
    CHECK(v <= 1.5);
  }
  std::sort(s.begin(), s.end());
  double gap = s.front() - 0.5;
  for (std::size_t i = 1; i < n; ++i) gap = std::max(gap, s[i] - s[i - 1]);
  gap = std::max(gap, 1.5 - s.back());
  CHECK(gap < 3.0 / static_cast<double>(n));
}

TEST_CASE("property: every strategy stays inside [0.5h, 1.5h]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> le(-12.0, 2.0);
  std::uniform_int_distribution<std::size_t> ln(2, 4000);
  for (int trial = 0; trial < 200; ++trial) {
    const double h = std::pow(10.0, le(rng));
    const std::size_t n = ln(rng);
    for (const auto& strat : {StepStrategy::mc_uniform(n, rng()), StepStrategy::equidistant(n),
                              StepStrategy::low_discrepancy(n), StepStrategy::single()}) {
      const auto seq = make_steps(strat, h);
      CHECK(seq.base_h == h);
      CHECK(seq.steps.size() == strat.sample_count());
      for (double s : seq.steps) {
        if (s < 0.5 * h || s > 1.5 * h) FAIL_CHECK("step " << s << " outside for h=" << h);
      }
    }
  }
}

TEST_CASE("strategy invariants") {
  CHECK(StepStrategy::single().sample_count() == 1);
  CHECK(StepStrategy::mc_uniform(17, 9).seed() == 9);
  CHECK_THROWS_AS(StepStrategy::mc_uniform(0, 1), InvalidStrategy);
  CHECK_THROWS_AS(StepStrategy::low_discrepancy(0), InvalidStrategy);
  CHECK(name(StepKind::McUniform) == "mc");
}

TEST_CASE("averaged derivative examples") {
  const FunctionHandle sq = [](double t) { return t * t; };
  const auto r = averaged_derivative(MethodId::AFD, sq, 1.0, 0.1, StepStrategy::equidistant(5));
  CHECK(r.mean == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r.sample_std <= 1e-15 * 100);  // five steps of O(1) cancellation noise
  CHECK(r.n == 5);

  const FunctionHandle p5 = [](double t) { return t * t * t * t * t; };
  const auto q = averaged_derivative(MethodId::RE, p5, 0.0, 0.1, StepStrategy::equidistant(2));
  CHECK(q.mean == doctest::Approx(-1.025e-3).epsilon(1e-12));
  CHECK(q.n == 2);

  const auto m = averaged_derivative(MethodId::AFD, kCos, 1.47, 1e-7, StepStrategy::mc_uniform(10'000, 1));
  const auto seq = steps_mc(1e-7, 10'000, 1);
  const auto est = single_step_estimates(MethodId::AFD, kCos, 1.47, seq.steps);
  std::vector<double> err(est.size());
  for (std::size_t i = 0; i < est.size(); ++i) err[i] = std::abs(est[i] + std::sin(1.47));
  CHECK(10 * std::abs(m.mean + std::sin(1.47)) <= median(err));
}

TEST_CASE("sample statistics") {
  const FunctionHandle lin = [](double t) { return 3.0 * t; };
  const auto r = averaged_over_steps(MethodId::AFD, lin, 0.0, std::vector<double>{1.0, 2.0, 4.0});
  CHECK(r.mean == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(r.n == 3);
  CHECK(r.predicted_sigma == doctest::Approx(r.sample_std / std::sqrt(3.0)).epsilon(1e-15));

  // afd of t^3 at 0 is h^2: estimates 1, 4, 9.
  const FunctionHandle cube = [](double t) { return t * t * t; };
  const std::vector<double> hs = {1.0, 2.0, 3.0};
  const auto c = averaged_over_steps(MethodId::AFD, cube, 0.0, hs);
  CHECK(c.mean == doctest::Approx(14.0 / 3.0).epsilon(1e-14));
  // Bessel-corrected.
  CHECK(c.sample_std == doctest::Approx(std::sqrt(((1 - 14.0 / 3) * (1 - 14.0 / 3) + (4 - 14.0 / 3) * (4 - 14.0 / 3) +
                                                   (9 - 14.0 / 3) * (9 - 14.0 / 3)) / 2.0))
                            .epsilon(1e-14));

  CHECK_THROWS_AS(averaged_over_steps(MethodId::AFD, lin, 0.0, std::vector<double>{}), InvalidStrategy);
  CHECK_THROWS_AS(averaged_derivative(MethodId::AFD, lin, 0.0, -1.0, StepStrategy::single()), InvalidStep);
}

TEST_CASE("single strategy equals the base estimator bit for bit") {
  const FunctionHandle l7(FunctionId::Laguerre7);
  for (MethodId m : kAllMethods) {
    for (double h : {1e-3, 1e-5, 1e-8}) {
      for (auto q : {QuadratureMode::PaperVerbatim, QuadratureMode::CorrectedComposite}) {
        const auto r = averaged_derivative(m, l7, 9.683, h, StepStrategy::single(), q);
        CHECK(same_bits(r.mean, estimate(m, l7, 9.683, h, q)));
        CHECK(r.sample_std == 0.0);
        CHECK(r.predicted_sigma == 0.0);
        CHECK(r.n == 1);
      }
    }
  }
}

TEST_CASE("batched estimates equal the pointwise estimator bit for bit") {
  const FunctionHandle l7(FunctionId::Laguerre7);
  const FunctionHandle ex(FunctionId::Exp);
  const auto steps = steps_mc(1e-4, 2500, 11).steps;
  for (MethodId m : kAllMethods) {
    for (auto q : {QuadratureMode::PaperVerbatim, QuadratureMode::CorrectedComposite}) {
      for (auto sm : {LdiSignMode::Corrected, LdiSignMode::PaperVerbatim}) {
        for (const auto* f : {&l7, &ex}) {
          const auto batch = single_step_estimates(m, *f, 2.25, steps, q, sm);
          bool all = true;
          for (std::size_t i = 0; i < steps.size(); ++i)
            all = all && same_bits(batch[i], estimate(m, *f, 2.25, steps[i], q, sm));
          CHECK(all);
        }
      }
    }
  }
}

TEST_CASE("property: permuting the steps barely moves the mean") {
  std::mt19937_64 rng(8);
  const FunctionHandle ex(FunctionId::Exp);
  for (MethodId m : kAllMethods) {
    auto steps = steps_mc(1e-6, 5000, 4).steps;
    const double base = averaged_over_steps(m, ex, 0.5, steps).mean;
    for (int k = 0; k < 5; ++k) {
      std::shuffle(steps.begin(), steps.end(), rng);
      const double p = averaged_over_steps(m, ex, 0.5, steps).mean;
      CHECK(std::abs(p - base) < 1e-14 * std::abs(base));
    }
  }
}

TEST_CASE("property: exact base estimator gives an exact mean") {
  const FunctionHandle quartic = [](double t) { return 0.5 * t * t * t * t - t * t * t + 2 * t; };
  const double x = 0.8;
  const double truth = 2 * x * x * x - 3 * x * x + 2;
  for (const auto& strat : {StepStrategy::mc_uniform(1000, 3), StepStrategy::equidistant(1000),
                            StepStrategy::low_discrepancy(1000), StepStrategy::single()}) {
    const auto r = averaged_derivative(MethodId::RE, quartic, x, 0.05, strat);
    CHECK(std::abs(r.mean - truth) < 1e-12 * std::abs(truth));
  }
}

TEST_CASE("property: error reduction grows with N") {
  int wins = 0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    const std::uint64_t seed = substream_seed(1000 + s, {});
    if (reduction_ratio(10'000, seed) > reduction_ratio(100, seed ^ 0x5555)) ++wins;
  }
  MESSAGE("ratio(1e4) > ratio(1e2) in " << wins << " of " << seeds << " seeds");
  CHECK(wins >= 16);
}

TEST_CASE("predict_error_reduction") {
  CHECK(predict_error_reduction(std::vector<double>{3.0, 4.0}) == 2.5);
  CHECK(predict_error_reduction(std::vector<double>{0.0}) == 0.0);
  const std::vector<double> same(400, 0.7);
  CHECK(predict_error_reduction(same) == doctest::Approx(0.7 / 20).epsilon(1e-14));
  CHECK_THROWS_AS(predict_error_reduction(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(predict_error_reduction(std::vector<double>{-1.0}), std::invalid_argument);
}

TEST_CASE("substream seeds") {
  CHECK(substream_seed(1, {2, 3}) == substream_seed(1, {2, 3}));
  CHECK(substream_seed(1, {2, 3}) != substream_seed(1, {3, 2}));
  CHECK(substream_seed(1, {2}) != substream_seed(2, {2}));
  CHECK(mix64(0) != 0);
}

TEST_CASE("non-finite estimates are reported") {
  const FunctionHandle blow = [](double t) { return t > 0 ? std::numeric_limits<double>::infinity() : 0.0; };
  CHECK_THROWS_AS(averaged_derivative(MethodId::AFD, blow, 0.0, 1e-3, StepStrategy::mc_uniform(10, 1)),
                  NonFiniteEstimate);
  CHECK_THROWS_AS(averaged_derivative(MethodId::AFD, blow, 0.0, 1e-3, StepStrategy::single()), NonFiniteEstimate);
}
