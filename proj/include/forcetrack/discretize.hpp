#pragma once

// Zero-order-hold discretization
//
//   x_{k+1} = A x_k + B f_k + w_k,   w_k ~ N(0, Q)
//   y_k     = H x_k + v_k,           v_k ~ N(0, R)
//
// with A = e^{A0 dt}, B = int_0^dt e^{A0 s} ds B0, H = H0,
// Q = int_0^dt e^{A0 s} Q0 e^{A0^T s} ds and R = R0 / dt.

#include "forcetrack/matkernel.hpp"
#include "forcetrack/model.hpp"

namespace forcetrack {

struct DiscreteModel {
  Matrix a;  // n x n
  Matrix b;  // n x m
  Matrix h;  // p x n
  Matrix q;  // n x n, PSD
  Matrix r;  // p x p, PD
  double dt = 0.0;

  Eigen::Index states() const { return a.rows(); }
  Eigen::Index inputs() const { return b.cols(); }
  Eigen::Index outputs() const { return h.rows(); }
};

struct VanLoanBlocks {
  Matrix a;
  Matrix b;
  Matrix q;
};

/// Evaluates the three ZOH integrals through two augmented exponentials:
/// exp([[A0, B0], [0, 0]] dt) carries A and B, and
/// exp([[-A0, Q0], [0, A0^T]] dt) carries Q as F22^T * F12 (symmetrized).
VanLoanBlocks van_loan_blocks(const Matrix& a0, const Matrix& b0, const Matrix& q0, double dt);

/// Throws DomainError for dt <= 0, ModelError listing validate() failures,
/// and InfeasibleError when H B loses column rank.
DiscreteModel discretize(const ContinuousModel& model, double dt);

}  // namespace forcetrack
