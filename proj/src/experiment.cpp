#include "forcetrack/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include "forcetrack/errors.hpp"

namespace forcetrack {
namespace {

void absorb(RunDiagnostics& into, const RunDiagnostics& from) {
  into.max_lhb_residual = std::max(into.max_lhb_residual, from.max_lhb_residual);
  into.max_mhb_residual = std::max(into.max_mhb_residual, from.max_mhb_residual);
  into.max_asymmetry = std::max(into.max_asymmetry, from.max_asymmetry);
  into.worst_psd_ratio = std::max(into.worst_psd_ratio, from.worst_psd_ratio);
  into.ill_conditioned_steps += from.ill_conditioned_steps;
}

void record_health(RunDiagnostics& diag, const Matrix& p) {
  const PsdReport psd = psd_check(p, 1e-12);
  const double norm = psd.norm;
  if (norm > 0.0) {
    diag.worst_psd_ratio = std::max(diag.worst_psd_ratio, -psd.min_eigenvalue / norm);
    diag.max_asymmetry = std::max(diag.max_asymmetry, (p - p.transpose()).norm() / p.norm());
  }
}

// Running sums over runs, added strictly in run-index order.
struct EnsembleSums {
  std::vector<Vector> f_err;
  std::vector<Vector> f_err_sq;
  std::vector<Matrix> f_outer;
  std::vector<Vector> x_err;
  RunDiagnostics diagnostics;

  EnsembleSums(long steps, Eigen::Index n, Eigen::Index m)
      : f_err(steps - 1, Vector::Zero(m)),
        f_err_sq(steps - 1, Vector::Zero(m)),
        f_outer(steps - 1, Matrix::Zero(m, m)),
        x_err(steps, Vector::Zero(n)) {}

  void add(const RunResult& run) {
    for (std::size_t k = 0; k < f_err.size(); ++k) {
      const Vector& e = run.f_err[k];
      f_err[k] += e;
      f_err_sq[k] += e.cwiseAbs2();
      f_outer[k] += e * e.transpose();
    }
    for (std::size_t k = 0; k < x_err.size(); ++k) {
      x_err[k] += run.trajectory.records[k].x_true - run.x_hat[k];
    }
    absorb(diagnostics, run.diagnostics);
  }
};

MonteCarloReport finish(EnsembleSums&& sums, const RunResult& first, long steps, long n_runs,
                        std::uint64_t base_seed, const MonteCarloOptions& options) {
  const double inv_n = 1.0 / static_cast<double>(n_runs);
  MonteCarloReport report;
  report.n_runs = n_runs;
  report.steps = steps;
  report.steady_state_start = options.steady_state_start;
  report.base_seed = base_seed;
  report.mse_theory = first.mse_theory;
  report.p = first.p;
  report.diagnostics = sums.diagnostics;

  const std::size_t f_steps = sums.f_err.size();
  report.v_numerical.reserve(f_steps);
  report.mse_numerical.reserve(f_steps);
  report.bias_f.reserve(f_steps);
  report.ratio.reserve(f_steps);
  for (std::size_t k = 0; k < f_steps; ++k) {
    report.v_numerical.push_back(sums.f_err_sq[k] * inv_n);
    report.mse_numerical.push_back(sums.f_outer[k] * inv_n);
    report.bias_f.push_back(sums.f_err[k] * inv_n);
    report.ratio.push_back(
        report.v_numerical.back().cwiseQuotient(Vector(report.mse_theory[k].diagonal())));
  }
  report.bias_x.reserve(sums.x_err.size());
  for (const auto& s : sums.x_err) report.bias_x.push_back(s * inv_n);

  // Falls back to every step when the steady-state window is empty.
  std::size_t begin = static_cast<std::size_t>(std::max(0L, options.steady_state_start));
  if (begin >= f_steps) begin = 0;
  double total = 0.0;
  for (std::size_t k = begin; k < f_steps; ++k) total += report.ratio[k].mean();
  report.grand_average_ratio = total / static_cast<double>(f_steps - begin);
  return report;
}

}  // namespace

FilterState initial_filter_state(const FilterInit& init, const Trajectory& traj,
                                 const DiscreteModel& dm) {
  const Eigen::Index n = dm.states();
  if (!(init.p0_scale >= 0.0)) throw DomainError("P0 scale must be >= 0");
  const Matrix p0 = init.p0_scale * Matrix::Identity(n, n);
  switch (init.mode) {
    case FilterInit::Mode::kTruth:
      return init_state(traj.records.front().x_true, p0);
    case FilterInit::Mode::kMeasurement: {
      const Matrix h_pinv = dm.h.completeOrthogonalDecomposition().pseudoInverse();
      return init_state(h_pinv * traj.records.front().y, p0);
    }
    case FilterInit::Mode::kExplicit:
      if (init.x0_hat.size() != n) throw DimensionError("x0_hat has wrong length");
      return init_state(init.x0_hat, p0);
  }
  throw DomainError("unknown filter init mode");
}

RunResult run_single(const DiscreteModel& dm, const ForceSignal& signal, const FilterInit& init,
                     const Vector& x0, long steps, std::uint64_t seed, std::uint64_t run) {
  if (steps < 2) throw DomainError("steps must be >= 2 to estimate a force");
  RunResult out;
  out.trajectory = simulate(dm, signal, x0, steps, seed, run);

  const auto n_steps = static_cast<std::size_t>(steps);
  out.x_hat.reserve(n_steps);
  out.p.reserve(n_steps);
  out.f_hat.reserve(n_steps - 1);
  out.f_err.reserve(n_steps - 1);
  out.mse_theory.reserve(n_steps - 1);
  out.mse_lower_bound.reserve(n_steps - 1);

  const Matrix b_pinv = pinv(dm.b);
  const double b_norm = dm.b.norm();
  const Matrix hb = dm.h * dm.b;
  const Matrix eye_m = Matrix::Identity(dm.inputs(), dm.inputs());

  FilterState state = initial_filter_state(init, out.trajectory, dm);
  out.x_hat.push_back(state.x_hat);
  out.p.push_back(state.p);
  record_health(out.diagnostics, state.p);

  for (std::size_t k = 0; k + 1 < n_steps; ++k) {
    const auto& next_record = out.trajectory.records[k + 1];
    UpdateResult step = update(state, next_record.y, dm);

    RunDiagnostics& diag = out.diagnostics;
    diag.max_lhb_residual =
        std::max(diag.max_lhb_residual, (step.gains.l * hb - dm.b).norm() / b_norm);
    diag.max_mhb_residual = std::max(diag.max_mhb_residual, (step.gains.m * hb - eye_m).norm());
    if (step.gains.ill_conditioned) ++diag.ill_conditioned_steps;
    record_health(diag, step.state.p);

    Vector f_hat = b_pinv * (step.state.x_hat - dm.a * state.x_hat);
    out.f_err.push_back(f_hat - out.trajectory.records[k].f_true);
    out.f_hat.push_back(std::move(f_hat));
    out.mse_theory.push_back(force_mse_theoretical(step.gains, state, dm));
    out.mse_lower_bound.push_back(force_mse_lower_bound(step.gains, dm));

    state = std::move(step.state);
    out.x_hat.push_back(state.x_hat);
    out.p.push_back(state.p);
  }
  return out;
}

double time_average_bias(std::span<const double> errors) {
  if (errors.empty()) throw DomainError("time average of an empty series");
  return std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(errors.size());
}

std::vector<double> component(const std::vector<Vector>& series, Eigen::Index i) {
  std::vector<double> out;
  out.reserve(series.size());
  for (const auto& v : series) out.push_back(v(i));
  return out;
}

MonteCarloReport monte_carlo(const DiscreteModel& dm, const ForceSignal& signal,
                             const FilterInit& init, const Vector& x0, long steps, long n_runs,
                             std::uint64_t base_seed, const MonteCarloOptions& options) {
  if (n_runs < 2) throw DomainError("Monte Carlo needs at least 2 runs");
  if (steps < 2) throw DomainError("steps must be >= 2 to estimate a force");

  const auto run_index = [&](long i) -> std::uint64_t {
    return options.identical_seeds ? 0 : static_cast<std::uint64_t>(i);
  };

  EnsembleSums sums(steps, dm.states(), dm.inputs());
  RunResult first = run_single(dm, signal, init, x0, steps, base_seed, run_index(0));
  sums.add(first);

  if (!options.parallel) {
    // Serial reference path.
    for (long i = 1; i < n_runs; ++i) {
      sums.add(run_single(dm, signal, init, x0, steps, base_seed, run_index(i)));
    }
    return finish(std::move(sums), first, steps, n_runs, base_seed, options);
  }

  // Runs execute concurrently in fixed-size blocks; each block is then folded
  // into the sums in run order, which keeps the result independent of the
  // thread schedule and bounds memory to one block of runs.
  constexpr long kBlock = 64;
  std::vector<RunResult> block(kBlock);
  for (long start = 1; start < n_runs; start += kBlock) {
    const long count = std::min(kBlock, n_runs - start);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long j = 0; j < count; ++j) {
      try {
        block[static_cast<std::size_t>(j)] =
            run_single(dm, signal, init, x0, steps, base_seed, run_index(start + j));
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    for (long j = 0; j < count; ++j) sums.add(block[static_cast<std::size_t>(j)]);
  }
  return finish(std::move(sums), first, steps, n_runs, base_seed, options);
}

}  // namespace forcetrack
