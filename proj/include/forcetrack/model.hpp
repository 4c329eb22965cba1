#pragma once

// Continuous-time linear Gaussian system
//
//   dx/dt = A0 x + B0 f + xi,    E[xi xi^T]   = Q0 delta(t - t')
//   y     = H0 x + eta,          E[eta eta^T] = R0 delta(t - t')
//
// and the optomechanical instance with x = [q, p]^T. Units live in the docs
// only; all numerics are raw doubles.

#include <string>
#include <vector>

#include "forcetrack/matkernel.hpp"

namespace forcetrack {

struct ContinuousModel {
  Matrix a0;  // n x n drift
  Matrix b0;  // n x m input
  Matrix h0;  // p x n observation
  Matrix q0;  // n x n process-noise intensity, PSD
  Matrix r0;  // p x p measurement-noise intensity, PD

  Eigen::Index states() const { return a0.rows(); }
  Eigen::Index inputs() const { return b0.cols(); }
  Eigen::Index outputs() const { return h0.rows(); }
};

// Mirror mass and frequency of the mechanical oscillator plus the common
// intensity D of backaction and measurement noise.
struct OptoParams {
  double mass = 0.0;             // kg
  double omega_m = 0.0;          // rad/s
  double noise_intensity = 0.0;  // D
};

/// A0 = [[0, 1/m], [-m w^2, 0]], B0 = [0; 1], H0 = [1, 0], Q0 = diag(0, D), R0 = [D].
/// Throws DomainError for non-positive parameters.
ContinuousModel build_optomechanical(const OptoParams& params);

/// Every violated invariant, one human-readable line each. Empty means valid.
std::vector<std::string> validate(const ContinuousModel& model);

}  // namespace forcetrack
