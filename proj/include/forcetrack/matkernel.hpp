#pragma once

// Small dense real-matrix kernel. Storage and elementary products come from
// Eigen; the exponential, pseudo-inverse and definiteness helpers below are
// the only higher-level operations the estimator needs.
//
// Dimensions in this project are small (n <= 32), so everything is dense and
// dynamically sized.

#include <Eigen/Dense>

#include <string_view>

namespace forcetrack {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Throws DimensionError if any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);

/// Throws DimensionError unless `m` is rows x cols.
void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, std::string_view what);

/// Returns (M + M^T) / 2.
Matrix symmetrize(const Matrix& m);

/// ||M - M^T||_F <= tol * ||M||_F (a zero matrix is symmetric).
bool is_symmetric(const Matrix& m, double tol = 1e-10);

/// Matrix exponential e^M.
///
/// Scaling and squaring with a diagonal Pade approximant (degree 3..13 picked
/// from the 1-norm), preceded by an exact power-of-two diagonal balancing.
/// The zero matrix maps to the identity exactly.
Matrix mat_exp(const Matrix& m);

/// Moore-Penrose inverse of a full-column-rank matrix, (B^T B)^{-1} B^T.
/// Throws RankError when the smallest eigenvalue of B^T B is below
/// 1e3 * eps * ||B^T B||.
Matrix pinv(const Matrix& b);

/// Inverse of a symmetric positive definite matrix via Cholesky.
/// Throws DefinitenessError for non-symmetric or non-PD input.
Matrix spd_inverse(const Matrix& m);

struct PsdReport {
  bool ok = false;
  double min_eigenvalue = 0.0;
  double norm = 0.0;  // spectral norm, max |lambda|
};

/// PSD diagnostic: ok iff lambda_min >= -tol * ||M||. Symmetrizes first.
PsdReport psd_check(const Matrix& m, double tol = 1e-12);

/// Smallest singular value relative to the largest is above 1e3*eps, and the
/// matrix has at least as many rows as columns.
bool has_full_column_rank(const Matrix& m);

}  // namespace forcetrack
