#pragma once

// Unknown-input reconstruction from consecutive filter states and its
// mean squared error. f_hat_k needs x_hat_{k+1|k+1}, so the estimate for step
// k only exists after y_{k+1} has been processed.

#include "forcetrack/discretize.hpp"
#include "forcetrack/umvfilter.hpp"

namespace forcetrack {

struct ForceEstimate {
  Vector f_hat;       // m-vector
  long k = 0;         // index of the force being estimated
  Matrix mse_theory;  // m x m
};

/// f_hat_k = B^+ (x_hat_{k+1|k+1} - A x_hat_{k|k}).
/// Throws SequencingError unless next.k == curr.k + 1.
Vector estimate_force(const FilterState& next, const FilterState& curr, const DiscreteModel& dm);

/// Same estimate written through the step's gain: M_{k+1} (y_{k+1} - H A x_hat_{k|k}).
Vector estimate_force_from_innovation(const StepGains& gains, const FilterState& curr,
                                      const Vector& y_next, const DiscreteModel& dm);

/// M H A P_{k|k} A^T H^T M^T + M H Q H^T M^T + M R M^T, with `gains` from the
/// step k -> k+1 and `curr` the state at k. R is the time-invariant R0/dt.
Matrix force_mse_theoretical(const StepGains& gains, const FilterState& curr,
                             const DiscreteModel& dm);

/// The two noise terms M H Q H^T M^T + M R M^T; never above the full MSE.
Matrix force_mse_lower_bound(const StepGains& gains, const DiscreteModel& dm);

/// Bundles estimate_force and force_mse_theoretical with index bookkeeping.
ForceEstimate make_force_estimate(const FilterState& next, const FilterState& curr,
                                  const StepGains& gains, const DiscreteModel& dm);

}  // namespace forcetrack
