#include "forcetrack/matkernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "forcetrack/errors.hpp"

namespace forcetrack {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double norm1(const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

// Parlett-Reinsch balancing with radix 2, so the similarity is exact in
// floating point. On return, balanced = D^{-1} m D with D = diag(scale).
void balance(Matrix& m, Vector& scale) {
  const Eigen::Index n = m.rows();
  scale = Vector::Ones(n);
  bool converged = false;
  while (!converged) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(m(j, i));
        r += std::abs(m(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if (c + r < 0.95 * s) {
        converged = false;
        scale(i) *= f;
        m.col(i) *= f;
        m.row(i) /= f;
      }
    }
  }
}

// Higham (2005) degree/threshold table.
constexpr std::array<double, 4> kTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                          9.504178996162932e-1, 2.097847961257068e0};
constexpr double kTheta13 = 5.371920351148152e0;

Matrix pade_low(const Matrix& a, int degree) {
  static constexpr std::array<double, 4> b3 = {120.0, 60.0, 12.0, 1.0};
  static constexpr std::array<double, 6> b5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  static constexpr std::array<double, 8> b7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                               25200.0,    1512.0,    56.0,      1.0};
  static constexpr std::array<double, 10> b9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                                302702400.0,   30270240.0,   2162160.0,
                                                110880.0,      3960.0,       90.0,
                                                1.0};
  const double* b = nullptr;
  switch (degree) {
    case 3: b = b3.data(); break;
    case 5: b = b5.data(); break;
    case 7: b = b7.data(); break;
    default: b = b9.data(); break;
  }
  const Eigen::Index n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix power = ident;
  Matrix u_inner = Matrix::Zero(n, n);
  Matrix v = Matrix::Zero(n, n);
  for (int j = 0; 2 * j <= degree; ++j) {
    v += b[2 * j] * power;
    u_inner += b[2 * j + 1] * power;
    power = power * a2;
  }
  const Matrix u = a * u_inner;
  return (v - u).partialPivLu().solve(v + u);
}

Matrix pade13(const Matrix& a) {
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  const Eigen::Index n = a.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                        b[3] * a2 + b[1] * ident);
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                   b[2] * a2 + b[0] * ident;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw DimensionError(std::string(what) + ": non-finite entry");
  }
}

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, std::string_view what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double norm = m.norm();
  if (norm == 0.0) return true;
  return (m - m.transpose()).norm() <= tol * norm;
}

Matrix mat_exp(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("mat_exp: matrix must be square");
  }
  require_finite(m, "mat_exp");
  const Eigen::Index n = m.rows();
  if (m.isZero(0.0)) {
    return Matrix::Identity(n, n);
  }

  Matrix a = m;
  Vector scale;
  balance(a, scale);

  const double norm = norm1(a);
  Matrix result;
  bool done = false;
  constexpr std::array<int, 4> degrees = {3, 5, 7, 9};
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (norm <= kTheta[i]) {
      result = pade_low(a, degrees[i]);
      done = true;
      break;
    }
  }
  if (!done) {
    const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
    result = pade13(a / std::ldexp(1.0, squarings));
    for (int i = 0; i < squarings; ++i) {
      result = result * result;
    }
  }

  // Undo the balancing: e^M = D e^{D^-1 M D} D^-1.
  for (Eigen::Index i = 0; i < n; ++i) {
    result.row(i) *= scale(i);
    result.col(i) /= scale(i);
  }
  return result;
}

Matrix pinv(const Matrix& b) {
  require_finite(b, "pinv");
  if (b.rows() < b.cols()) {
    throw RankError("pinv: matrix has more columns than rows, no full column rank");
  }
  const Matrix gram = b.transpose() * b;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double largest = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double smallest = eig.eigenvalues().minCoeff();
  if (largest == 0.0 || smallest <= 1e3 * kEps * largest) {
    throw RankError("pinv: matrix is rank-deficient (B^T B singular within tolerance)");
  }
  return gram.llt().solve(b.transpose());
}

Matrix spd_inverse(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("spd_inverse: matrix must be square");
  }
  require_finite(m, "spd_inverse");
  if (!is_symmetric(m, 1e-10)) {
    throw DefinitenessError("spd_inverse: matrix is not symmetric");
  }
  const Matrix sym = symmetrize(m);
  const Eigen::LLT<Matrix> llt(sym);
  if (llt.info() != Eigen::Success) {
    throw DefinitenessError("spd_inverse: matrix is not positive definite");
  }
  const Eigen::Index n = m.rows();
  return symmetrize(llt.solve(Matrix::Identity(n, n)));
}

PsdReport psd_check(const Matrix& m, double tol) {
  PsdReport report;
  if (m.rows() != m.cols() || m.size() == 0 || !m.allFinite()) {
    return report;
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(m), Eigen::EigenvaluesOnly);
  report.min_eigenvalue = eig.eigenvalues().minCoeff();
  report.norm = eig.eigenvalues().cwiseAbs().maxCoeff();
  report.ok = report.min_eigenvalue >= -tol * report.norm;
  return report;
}

bool has_full_column_rank(const Matrix& m) {
  if (m.rows() < m.cols() || m.size() == 0) return false;
  const Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sv = svd.singularValues();
  const double largest = sv(0);
  return largest > 0.0 && sv(sv.size() - 1) > 1e3 * kEps * largest;
}

}  // namespace forcetrack
