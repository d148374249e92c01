#pragma once

#include <stdexcept>
#include <string>

namespace kdvk {

// Bad configuration or a violated precondition. The CLI maps this to exit code 1.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Spectral weight e^{sigma |xi|} would leave the representable range.
class OverflowGuardError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// An estimator could not produce a result from the data it was given.
class EstimatorError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A time integration produced NaN/Inf or left its stability region.
// The CLI maps this to exit code 2.
class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(const std::string& what, double last_valid_time)
      : std::runtime_error(what), last_valid_time_(last_valid_time) {}

  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

}  // namespace kdvk
