#include "forcetrack/model.hpp"

#include <cmath>

#include "forcetrack/errors.hpp"

namespace forcetrack {

ContinuousModel build_optomechanical(const OptoParams& params) {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(params.mass)) throw DomainError("mass must be positive");
  if (!positive(params.omega_m)) throw DomainError("omega_m must be positive");
  if (!positive(params.noise_intensity)) throw DomainError("noise intensity D must be positive (R0 not positive definite)");

  const double m = params.mass;
  const double w = params.omega_m;
  const double d = params.noise_intensity;

  ContinuousModel model;
  model.a0.resize(2, 2);
  model.a0 << 0.0, 1.0 / m, -m * w * w, 0.0;
  model.b0.resize(2, 1);
  model.b0 << 0.0, 1.0;
  model.h0.resize(1, 2);
  model.h0 << 1.0, 0.0;
  model.q0 = Matrix::Zero(2, 2);
  model.q0(1, 1) = d;
  model.r0 = Matrix::Constant(1, 1, d);
  return model;
}

std::vector<std::string> validate(const ContinuousModel& model) {
  std::vector<std::string> violations;
  const Eigen::Index n = model.a0.rows();

  if (n == 0 || model.a0.cols() != n) {
    violations.emplace_back("A0 must be square and non-empty");
    return violations;
  }
  const Eigen::Index m = model.b0.cols();
  const Eigen::Index p = model.h0.rows();
  if (model.b0.rows() != n || m == 0) violations.emplace_back("B0 must be n x m with m >= 1");
  if (model.h0.cols() != n || p == 0) violations.emplace_back("H0 must be p x n with p >= 1");
  if (model.q0.rows() != n || model.q0.cols() != n) violations.emplace_back("Q0 must be n x n");
  if (model.r0.rows() != p || model.r0.cols() != p) violations.emplace_back("R0 must be p x p");
  if (!violations.empty()) return violations;

  for (const auto* mat : {&model.a0, &model.b0, &model.h0, &model.q0, &model.r0}) {
    if (!mat->allFinite()) {
      violations.emplace_back("model matrices contain non-finite entries");
      return violations;
    }
  }

  if (!is_symmetric(model.q0)) {
    violations.emplace_back("Q0 not symmetric");
  } else if (!psd_check(model.q0).ok) {
    violations.emplace_back("Q0 not positive semi-definite");
  }

  if (!is_symmetric(model.r0)) {
    violations.emplace_back("R0 not symmetric");
  } else {
    const PsdReport r = psd_check(model.r0);
    if (r.norm == 0.0 || r.min_eigenvalue <= 0.0) {
      violations.emplace_back("R0 not positive definite");
    }
  }

  if (!has_full_column_rank(model.b0)) {
    violations.emplace_back("B0 rank-deficient");
  }
  return violations;
}

}  // namespace forcetrack
