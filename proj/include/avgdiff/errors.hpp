#pragma once

#include <stdexcept>
#include <string>

namespace avgdiff {

enum class FunctionId;

/// Argument outside the domain of a registered test function (ln at x <= 0).
class DomainError : public std::domain_error {
 public:
  DomainError(FunctionId fn, double x);

  FunctionId function() const noexcept { return fn_; }
  double argument() const noexcept { return x_; }

 private:
  FunctionId fn_;
  double x_;
};

class InvalidStep : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidInterval : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidStrategy : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidAggregation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A single-step estimate inside an average came out inf/nan.
class NonFiniteEstimate : public std::runtime_error {
 public:
  NonFiniteEstimate(double step, double value);

  double step() const noexcept { return step_; }

 private:
  double step_;
};

}  // namespace avgdiff
