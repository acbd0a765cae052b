#pragma once

#include <stdexcept>
#include <string>

namespace surge {

/// Thrown when the positivity conditions behind the scaling laws are violated
/// (non-positive Hessian trace, non-positive cross-coordinate sum, or a
/// non-positive optimal-LR denominator). Carries the offending sums so callers
/// can report a diagnostic instead of propagating NaNs.
class law_violation_error : public std::runtime_error {
  public:
    law_violation_error(const std::string& what, double trace_sum, double cross_sum)
        : std::runtime_error(what + " (trace sum = " + std::to_string(trace_sum) +
                             ", cross sum = " + std::to_string(cross_sum) + ")"),
          trace_sum_(trace_sum),
          cross_sum_(cross_sum) {}

    double trace_sum() const { return trace_sum_; }
    double cross_sum() const { return cross_sum_; }

  private:
    double trace_sum_;
    double cross_sum_;
};

/// Thrown when grid observations cannot be fit by the 1/S-vs-1/E line model
/// (degenerate design, wrong-sign slope, or non-positive intercept).
class fit_failure_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a lookup (e.g. optimal LR for a batch size with no converged
/// runs) has no answer.
class not_found_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace surge
