#include "forcetrack/umvfilter.hpp"

#include <iostream>
#include <limits>

#include "forcetrack/errors.hpp"

namespace forcetrack {
namespace {

struct GainTerms {
  StepGains gains;
  Matrix k;                  // P H^T C^{-1}
  Matrix correction;         // B - K H B
  Matrix constraint_inverse; // S^{-1}
};

GainTerms compute_gain(const Matrix& p_pred, const DiscreteModel& dm) {
  const Eigen::Index n = dm.states();
  const Eigen::Index p = dm.outputs();
  require_shape(p_pred, n, n, "P_pred");

  GainTerms t;
  t.gains.p_pred = p_pred;
  t.gains.c = symmetrize(dm.h * p_pred * dm.h.transpose() + dm.r);

  const Matrix c_inv = spd_inverse(t.gains.c);
  if (p > 0) {
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(t.gains.c, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (lo <= 0.0 || hi / lo > 1e12) {
      t.gains.ill_conditioned = true;
      std::clog << "warning: innovation covariance nearly singular (cond > 1e12)\n";
    }
  }

  const Matrix hb = dm.h * dm.b;
  const Matrix hb_t_c_inv = hb.transpose() * c_inv;
  const Matrix s = symmetrize(hb_t_c_inv * hb);

  // S is PD exactly when HB has full column rank; relative test on S's spectrum.
  const Eigen::SelfAdjointEigenSolver<Matrix> s_eig(s, Eigen::EigenvaluesOnly);
  const double s_max = s_eig.eigenvalues().cwiseAbs().maxCoeff();
  if (!(s_max > 0.0) ||
      s_eig.eigenvalues().minCoeff() <= 1e3 * std::numeric_limits<double>::epsilon() * s_max) {
    throw InfeasibleError("unbiased input estimation infeasible (rank HB deficient)");
  }
  t.constraint_inverse = spd_inverse(s);

  t.k = p_pred * dm.h.transpose() * c_inv;
  t.correction = dm.b - t.k * hb;
  t.gains.l = t.k + t.correction * t.constraint_inverse * hb_t_c_inv;
  t.gains.m = pinv(dm.b) * t.gains.l;
  return t;
}

}  // namespace

FilterState init_state(const Vector& x0_hat, const Matrix& p0) {
  const Eigen::Index n = x0_hat.size();
  require_shape(p0, n, n, "P0");
  require_finite(x0_hat, "x0_hat");
  require_finite(p0, "P0");
  if (!is_symmetric(p0, 1e-12)) {
    throw DefinitenessError("P0 not symmetric");
  }
  if (!psd_check(p0).ok) {
    throw DefinitenessError("P0 not positive semi-definite");
  }
  return FilterState{x0_hat, symmetrize(p0), 0};
}

Matrix predict_covariance(const FilterState& state, const DiscreteModel& dm) {
  require_shape(state.p, dm.states(), dm.states(), "P");
  return symmetrize(dm.a * state.p * dm.a.transpose() + dm.q);
}

StepGains gain(const Matrix& p_pred, const DiscreteModel& dm) {
  return compute_gain(p_pred, dm).gains;
}

UpdateResult update(const FilterState& state, const Vector& y_next, const DiscreteModel& dm) {
  if (y_next.size() != dm.outputs()) {
    throw DimensionError("measurement has wrong length");
  }
  if (state.x_hat.size() != dm.states()) {
    throw DimensionError("state estimate has wrong length");
  }
  const Matrix p_pred = predict_covariance(state, dm);
  GainTerms t = compute_gain(p_pred, dm);

  const Vector x_pred = dm.a * state.x_hat;
  const Vector innovation = y_next - dm.h * x_pred;

  UpdateResult out;
  out.state.x_hat = x_pred + t.gains.l * innovation;
  out.state.p = symmetrize(p_pred - t.k * dm.h * p_pred +
                           t.correction * t.constraint_inverse * t.correction.transpose());
  out.state.k = state.k + 1;
  out.gains = std::move(t.gains);
  return out;
}

}  // namespace forcetrack
