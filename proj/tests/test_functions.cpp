#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "avgdiff/functions.hpp"
#include "oracle.hpp"

using namespace avgdiff;

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

TEST_CASE("eval at trivial points") {
  CHECK(eval(FunctionId::Laguerre7, 0.0) == 1.0);
  CHECK(eval(FunctionId::Cos, 0.0) == 1.0);
  CHECK(d1_exact(FunctionId::Ln, 1.0) == 1.0);
  CHECK(d2_exact(FunctionId::Ln, 10.0) == doctest::Approx(-0.01).epsilon(1e-15));
}

TEST_CASE("Laguerre7 value matches a 50-digit Horner oracle") {
  const double x = 9.683;
  const oracle::hp ref = oracle::laguerre7(oracle::hp(x));
  // Frozen from an independent mpmath evaluation at the same binary x.
  CHECK(static_cast<double>(ref) == doctest::Approx(-24.669700051180779023).epsilon(1e-16));
  const double got = eval(FunctionId::Laguerre7, x);
  const double bound = 16 * kEps * oracle::laguerre7_abs_scale(x);
  CHECK(std::abs(got - static_cast<double>(ref)) <= bound);
}

TEST_CASE("Laguerre7 derivatives match the oracle at every Laguerre case") {
  for (const auto& c : case_table()) {
    if (c.fn != FunctionId::Laguerre7) continue;
    CAPTURE(c.case_id);
    for (int d = 0; d <= 2; ++d) {
      const double ref = static_cast<double>(oracle::laguerre7(oracle::hp(c.x), d));
      const double got = d == 0 ? eval(c.fn, c.x) : d == 1 ? d1_exact(c.fn, c.x) : d2_exact(c.fn, c.x);
      CHECK(std::abs(got - ref) <= 16 * kEps * oracle::laguerre7_abs_scale(c.x, d));
    }
  }
}

TEST_CASE("published magnitudes of selected cases") {
  CHECK(std::abs(d1_exact(FunctionId::Exp, -6.9)) == doctest::Approx(0.0010).epsilon(0.01));
  CHECK(std::abs(d1_exact(FunctionId::Laguerre7, 9.683)) == doctest::Approx(19.88).epsilon(0.001));
  CHECK(std::abs(d2_exact(FunctionId::Atan, 0.002)) == doctest::Approx(0.0039).epsilon(0.03));
  CHECK(std::abs(d2_exact(FunctionId::Exp, 4.25)) == doctest::Approx(70.10).epsilon(0.001));
}

TEST_CASE("case table matches Table 1 layout") {
  const auto& t = case_table();
  REQUIRE(t.size() == 19);
  std::set<int> ids;
  for (const auto& c : t) {
    ids.insert(c.case_id);
    CHECK(in_domain(c.fn, c.x));
  }
  CHECK(ids.size() == 19);
  CHECK(*ids.begin() == 1);
  CHECK(*ids.rbegin() == 19);

  const auto& row3 = find_case(3);
  CHECK(row3.fn == FunctionId::Laguerre7);
  CHECK(row3.x == 15.83);
  CHECK(row3.abs_d1_published == 265.1);
  CHECK(row3.abs_d2_published == 0.1534);

  const auto& row16 = find_case(16);
  CHECK(row16.fn == FunctionId::Ln);
  CHECK(row16.x == 1.0);
  CHECK(row16.abs_d1_published == 1.0);
  CHECK(row16.abs_d2_published == 1.0);

  CHECK_THROWS_AS(find_case(20), std::invalid_argument);
}

TEST_CASE("validate_case_table passes every row") {
  const auto checks = validate_case_table();
  REQUIRE(checks.size() == 19);
  for (const auto& c : checks) {
    CAPTURE(c.case_id);
    CHECK(c.pass());
  }
  CHECK(checks[9].abs_d1 == doctest::Approx(0.9949).epsilon(1e-4));
  CHECK(checks[9].abs_d2 == doctest::Approx(0.1006).epsilon(1e-3));
  CHECK(checks[15].abs_d1 == 1.0);
  CHECK(checks[15].abs_d2 == 1.0);

  // Case 6 sits next to a root of L7'; the oracle agrees with the printed 0.0048 / 356.8.
  const double d1 = std::abs(static_cast<double>(oracle::laguerre7(oracle::hp(17.64595), 1)));
  const double d2 = std::abs(static_cast<double>(oracle::laguerre7(oracle::hp(17.64595), 2)));
  CHECK(std::abs(checks[5].abs_d1 - d1) < 1e-9);
  CHECK(std::abs(checks[5].abs_d2 - d2) < 1e-9);
  CHECK(std::abs(d1 - 0.0048) <= 1e-4);
  CHECK(std::abs(d2 - 356.8) <= 0.1);
}

TEST_CASE("every case is finite") {
  for (const auto& c : case_table()) {
    CAPTURE(c.case_id);
    CHECK(std::isfinite(eval(c.fn, c.x)));
    CHECK(std::isfinite(d1_exact(c.fn, c.x)));
    CHECK(std::isfinite(d2_exact(c.fn, c.x)));
  }
}

TEST_CASE("Laguerre7 first derivative agrees with a centered difference") {
  for (const auto& c : case_table()) {
    if (c.fn != FunctionId::Laguerre7) continue;
    CAPTURE(c.case_id);
    const double h = 1e-5;
    const double fd = (eval(c.fn, c.x + h) - eval(c.fn, c.x - h)) / (2 * h);
    const double exact = d1_exact(c.fn, c.x);
    // Relative where |f'| is sizeable; the near-root cases fall back to an absolute floor.
    CHECK(std::abs(fd - exact) <= 1e-5 * std::max(std::abs(exact), 1.0));
  }
}

TEST_CASE("domain violations carry the function and argument") {
  CHECK_THROWS_AS(eval(FunctionId::Ln, 0.0), DomainError);
  CHECK_THROWS_AS(d1_exact(FunctionId::Ln, -1.0), DomainError);
  CHECK_THROWS_AS(d2_exact(FunctionId::Ln, -1.0), DomainError);
  try {
    eval(FunctionId::Ln, -2.5);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(e.function() == FunctionId::Ln);
    CHECK(e.argument() == -2.5);
  }
}

TEST_CASE("function handle is deterministic and batch equals pointwise") {
  for (FunctionId fn : kAllFunctions) {
    const FunctionHandle f(fn);
    std::vector<double> xs;
    for (int i = 1; i <= 37; ++i) xs.push_back(0.37 * i);
    std::vector<double> out(xs.size());
    f.eval_batch(xs, out);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      CHECK(f(xs[i]) == f(xs[i]));
      CHECK(out[i] == f(xs[i]));
    }
  }
  const FunctionHandle ln(FunctionId::Ln);
  std::vector<double> bad = {1.0, -1.0};
  std::vector<double> out(2);
  CHECK_THROWS_AS(ln.eval_batch(bad, out), DomainError);
}

TEST_CASE("function names round trip") {
  for (FunctionId fn : kAllFunctions) CHECK(parse_function(name(fn)) == fn);
  CHECK(parse_function("COS") == FunctionId::Cos);
  CHECK_THROWS_AS(parse_function("sinh"), std::invalid_argument);
}
