#pragma once

// Unbiased minimum-variance (Kitanidis) filter for x_{k+1} = A x_k + B f_k + w_k
// with f_k unknown. One call to update() consumes y_{k+1} and produces
// x_hat_{k+1|k+1} = A x_hat_{k|k} + L_{k+1} (y_{k+1} - H A x_hat_{k|k}).
//
// The gain is constrained so that L H B = B, which removes f_k from the
// estimation error. There is no separate state-prediction output: prediction
// and correction are a single step.

#include "forcetrack/discretize.hpp"
#include "forcetrack/matkernel.hpp"

namespace forcetrack {

struct FilterState {
  Vector x_hat;  // x_hat_{k|k}
  Matrix p;      // P_{k|k} = E[(x_k - x_hat)(x_k - x_hat)^T]
  long k = 0;
};

struct StepGains {
  Matrix l;       // n x p gain L_{k+1}
  Matrix m;       // m x p, B^+ L_{k+1}
  Matrix c;       // p x p innovation covariance C_{k+1}
  Matrix p_pred;  // n x n, P_{k+1|k}
  bool ill_conditioned = false;  // cond(C) > 1e12
};

/// Throws DefinitenessError unless P0 is symmetric PSD.
FilterState init_state(const Vector& x0_hat, const Matrix& p0);

/// A P A^T + Q, symmetrized.
Matrix predict_covariance(const FilterState& state, const DiscreteModel& dm);

/// Constrained gain from P_{k+1|k}:
///
///   C = H P H^T + R,  K = P H^T C^{-1},  S = B^T H^T C^{-1} H B,
///   L = K + (B - K H B) S^{-1} B^T H^T C^{-1}.
///
/// Throws InfeasibleError when S is singular (rank HB < m).
StepGains gain(const Matrix& p_pred, const DiscreteModel& dm);

struct UpdateResult {
  FilterState state;  // at k + 1
  StepGains gains;
};

/// Consumes y_{k+1}. The covariance update is
/// P_{k+1|k+1} = P - K H P + (B - K H B) S^{-1} (B - K H B)^T, symmetrized.
UpdateResult update(const FilterState& state, const Vector& y_next, const DiscreteModel& dm);

}  // namespace forcetrack
