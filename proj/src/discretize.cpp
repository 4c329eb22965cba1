#include "forcetrack/discretize.hpp"

#include <cmath>
#include <string>

#include "forcetrack/errors.hpp"

namespace forcetrack {

VanLoanBlocks van_loan_blocks(const Matrix& a0, const Matrix& b0, const Matrix& q0, double dt) {
  const Eigen::Index n = a0.rows();
  const Eigen::Index m = b0.cols();
  require_shape(a0, n, n, "A0");
  require_shape(b0, n, m, "B0");
  require_shape(q0, n, n, "Q0");

  Matrix input_block = Matrix::Zero(n + m, n + m);
  input_block.topLeftCorner(n, n) = a0 * dt;
  input_block.topRightCorner(n, m) = b0 * dt;
  const Matrix input_exp = mat_exp(input_block);

  Matrix noise_block = Matrix::Zero(2 * n, 2 * n);
  noise_block.topLeftCorner(n, n) = -a0 * dt;
  noise_block.topRightCorner(n, n) = q0 * dt;
  noise_block.bottomRightCorner(n, n) = a0.transpose() * dt;
  const Matrix noise_exp = mat_exp(noise_block);

  VanLoanBlocks out;
  out.a = input_exp.topLeftCorner(n, n);
  out.b = input_exp.topRightCorner(n, m);
  out.q = symmetrize(noise_exp.bottomRightCorner(n, n).transpose() * noise_exp.topRightCorner(n, n));
  return out;
}

DiscreteModel discretize(const ContinuousModel& model, double dt) {
  if (!(std::isfinite(dt) && dt > 0.0)) {
    throw DomainError("dt must be positive");
  }
  const auto violations = validate(model);
  if (!violations.empty()) {
    std::string msg = "invalid continuous model:";
    for (const auto& v : violations) msg += " " + v + ";";
    throw ModelError(msg);
  }

  const VanLoanBlocks blocks = van_loan_blocks(model.a0, model.b0, model.q0, dt);

  DiscreteModel dm;
  dm.a = blocks.a;
  dm.b = blocks.b;
  dm.h = model.h0;
  dm.q = blocks.q;
  dm.r = model.r0 / dt;
  dm.dt = dt;

  if (!has_full_column_rank(dm.b)) {
    throw InfeasibleError(
        "unbiased input estimation infeasible (discretized B rank-deficient)");
  }
  if (!has_full_column_rank(dm.h * dm.b)) {
    throw InfeasibleError("unbiased input estimation infeasible (rank HB deficient)");
  }
  return dm;
}

}  // namespace forcetrack
