#pragma once

// Reference computations used only by tests. None of these call into the
// library's exponential or discretization code.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <Eigen/Dense>

#include <cmath>

#include "forcetrack/matkernel.hpp"

namespace oracle {

using forcetrack::Matrix;
using forcetrack::Vector;

struct ReferenceParams {
  static constexpr double mass = 5.88e-4;
  static constexpr double omega = 1.76e5;
  static constexpr double noise = 1e-14;
  static constexpr double dt = 1e-4;
};

// Closed-form ZOH discretization of the undamped oscillator
// dq/dt = p/m, dp/dt = -m w^2 q + f + noise, evaluated in long double.
struct OscillatorClosedForm {
  Matrix a;
  Matrix b;
  Matrix q;
};

inline OscillatorClosedForm oscillator_closed_form(double mass, double omega, double d, double dt) {
  const long double m = mass;
  const long double w = omega;
  const long double th = w * static_cast<long double>(dt);
  const long double c = std::cos(th);
  const long double s = std::sin(th);
  OscillatorClosedForm out;
  out.a.resize(2, 2);
  out.a << static_cast<double>(c), static_cast<double>(s / (m * w)),
      static_cast<double>(-m * w * s), static_cast<double>(c);
  out.b.resize(2, 1);
  out.b << static_cast<double>((1.0L - c) / (m * w * w)), static_cast<double>(s / w);
  const long double half = static_cast<long double>(dt) / 2.0L;
  const long double sin2 = std::sin(2.0L * th) / (4.0L * w);
  const long double q11 = d / ((m * w) * (m * w)) * (half - sin2);
  const long double q12 = d / (m * w) * (s * s / (2.0L * w));
  const long double q22 = d * (half + sin2);
  out.q.resize(2, 2);
  out.q << static_cast<double>(q11), static_cast<double>(q12), static_cast<double>(q12),
      static_cast<double>(q22);
  return out;
}

// Adaptive Gauss-Kronrod quadrature of the oscillator noise integrand
// D * [sin^2/(mw)^2, sin cos/(mw); ., cos^2] over [0, dt].
inline Matrix oscillator_q_quadrature(double mass, double omega, double d, double dt) {
  using boost::math::quadrature::gauss_kronrod;
  const double mw = mass * omega;
  const auto integrate = [&](auto f) {
    double err = 0.0;
    return gauss_kronrod<double, 61>::integrate(f, 0.0, dt, 15, 1e-13, &err);
  };
  const double q11 = integrate([&](double t) {
    const double s = std::sin(omega * t) / mw;
    return d * s * s;
  });
  const double q12 = integrate([&](double t) {
    return d * std::sin(omega * t) * std::cos(omega * t) / mw;
  });
  const double q22 = integrate([&](double t) {
    const double c = std::cos(omega * t);
    return d * c * c;
  });
  Matrix q(2, 2);
  q << q11, q12, q12, q22;
  return q;
}

// Same integrand for B: int_0^dt [sin(w t)/(m w), cos(w t)] dt.
inline Matrix oscillator_b_quadrature(double mass, double omega, double dt) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  const double b1 = gauss_kronrod<double, 61>::integrate(
      [&](double t) { return std::sin(omega * t) / (mass * omega); }, 0.0, dt, 15, 1e-13, &err);
  const double b2 = gauss_kronrod<double, 61>::integrate(
      [&](double t) { return std::cos(omega * t); }, 0.0, dt, 15, 1e-13, &err);
  Matrix b(2, 1);
  b << b1, b2;
  return b;
}

using HighPrecision = boost::multiprecision::cpp_bin_float_50;
using HpMatrix = Eigen::Matrix<HighPrecision, Eigen::Dynamic, Eigen::Dynamic>;

// e^M by a 60-term Taylor series in 50-digit arithmetic, after halving M until
// its max-abs entry is below 1/2, then squaring back.
inline Matrix series_exp(const Matrix& m) {
  const Eigen::Index n = m.rows();
  HpMatrix a = m.cast<HighPrecision>();
  int squarings = 0;
  double size = m.cwiseAbs().maxCoeff() * static_cast<double>(n);
  while (size > 0.5) {
    size /= 2.0;
    ++squarings;
  }
  a /= HighPrecision(std::ldexp(1.0, squarings));
  HpMatrix term = HpMatrix::Identity(n, n);
  HpMatrix sum = HpMatrix::Identity(n, n);
  for (int j = 1; j <= 60; ++j) {
    term = (term * a) / HighPrecision(j);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = static_cast<double>(sum(i, j));
  }
  return out;
}

// Classic RK4 on dx/dt = A0 x + B0 u with constant u and x(0) = x0.
inline Vector rk4(const Matrix& a0, const Matrix& b0, const Vector& u, const Vector& x0, double t,
                  long steps) {
  const double h = t / static_cast<double>(steps);
  Vector x = x0;
  const Vector drive = b0 * u;
  const auto f = [&](const Vector& s) -> Vector { return a0 * s + drive; };
  for (long i = 0; i < steps; ++i) {
    const Vector k1 = f(x);
    const Vector k2 = f(x + 0.5 * h * k1);
    const Vector k3 = f(x + 0.5 * h * k2);
    const Vector k4 = f(x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

// Generic ZOH integrals by composite Gauss-Kronrod on sub-intervals, with the
// integrand built from series_exp. Slow; intended for small test systems.
inline void generic_zoh_quadrature(const Matrix& a0, const Matrix& b0, const Matrix& q0, double dt,
                                   Matrix& b_out, Matrix& q_out) {
  using boost::math::quadrature::gauss_kronrod;
  const Eigen::Index n = a0.rows();
  b_out = Matrix::Zero(n, b0.cols());
  q_out = Matrix::Zero(n, n);
  const auto& nodes = gauss_kronrod<double, 31>::abscissa();
  const auto& weights = gauss_kronrod<double, 31>::weights();
  constexpr int pieces = 8;
  const double width = dt / pieces;
  for (int piece = 0; piece < pieces; ++piece) {
    const double mid = (piece + 0.5) * width;
    const double half = 0.5 * width;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (int sign : {-1, 1}) {
        if (nodes[i] == 0.0 && sign < 0) continue;
        const double t = mid + sign * half * nodes[i];
        const Matrix e = series_exp(a0 * t);
        const double w = half * weights[i];
        b_out += w * e * b0;
        q_out += w * e * q0 * e.transpose();
      }
    }
  }
}

inline double max_relative_error(const Matrix& got, const Matrix& want) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < want.rows(); ++i) {
    for (Eigen::Index j = 0; j < want.cols(); ++j) {
      const double scale = std::abs(want(i, j));
      const double diff = std::abs(got(i, j) - want(i, j));
      worst = std::max(worst, scale > 0.0 ? diff / scale : diff);
    }
  }
  return worst;
}

}  // namespace oracle
