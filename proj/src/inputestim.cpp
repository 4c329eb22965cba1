#include "forcetrack/inputestim.hpp"

#include <string>

#include "forcetrack/errors.hpp"

namespace forcetrack {

Vector estimate_force(const FilterState& next, const FilterState& curr, const DiscreteModel& dm) {
  if (next.k != curr.k + 1) {
    throw SequencingError("force estimate needs consecutive states, got k=" +
                          std::to_string(curr.k) + " and k=" + std::to_string(next.k));
  }
  if (next.x_hat.size() != dm.states() || curr.x_hat.size() != dm.states()) {
    throw DimensionError("state estimate has wrong length");
  }
  return pinv(dm.b) * (next.x_hat - dm.a * curr.x_hat);
}

Vector estimate_force_from_innovation(const StepGains& gains, const FilterState& curr,
                                      const Vector& y_next, const DiscreteModel& dm) {
  return gains.m * (y_next - dm.h * dm.a * curr.x_hat);
}

Matrix force_mse_theoretical(const StepGains& gains, const FilterState& curr,
                             const DiscreteModel& dm) {
  require_shape(gains.m, dm.inputs(), dm.outputs(), "M");
  require_shape(curr.p, dm.states(), dm.states(), "P");
  const Matrix mha = gains.m * dm.h * dm.a;
  const Matrix propagated = mha * curr.p * mha.transpose();
  return symmetrize(propagated + force_mse_lower_bound(gains, dm));
}

Matrix force_mse_lower_bound(const StepGains& gains, const DiscreteModel& dm) {
  require_shape(gains.m, dm.inputs(), dm.outputs(), "M");
  const Matrix mh = gains.m * dm.h;
  return symmetrize(mh * dm.q * mh.transpose() + gains.m * dm.r * gains.m.transpose());
}

ForceEstimate make_force_estimate(const FilterState& next, const FilterState& curr,
                                  const StepGains& gains, const DiscreteModel& dm) {
  ForceEstimate est;
  est.f_hat = estimate_force(next, curr, dm);
  est.k = curr.k;
  est.mse_theory = force_mse_theoretical(gains, curr, dm);
  return est;
}

}  // namespace forcetrack
