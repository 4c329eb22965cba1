#pragma once

// Single runs and Monte Carlo ensembles of simulate -> filter -> force estimate.
//
// monte_carlo() has an OpenMP path and a serial reference path. Both reduce
// per-run results in run-index order, so they return bit-identical reports.

#include <cstdint>
#include <span>
#include <vector>

#include "forcetrack/discretize.hpp"
#include "forcetrack/inputestim.hpp"
#include "forcetrack/simkit.hpp"
#include "forcetrack/umvfilter.hpp"

namespace forcetrack {

struct FilterInit {
  enum class Mode {
    kTruth,        // x_hat_{0|0} = x_0 of the simulated trajectory
    kMeasurement,  // x_hat_{0|0} = H^+ y_0
    kExplicit,     // x_hat_{0|0} = x0_hat
  };
  Mode mode = Mode::kTruth;
  Vector x0_hat;
  double p0_scale = 1e-10;  // P_{0|0} = p0_scale * I
};

FilterState initial_filter_state(const FilterInit& init, const Trajectory& traj,
                                 const DiscreteModel& dm);

// Worst-case health numbers seen over a run (or an ensemble).
struct RunDiagnostics {
  double max_lhb_residual = 0.0;  // max_k ||L H B - B|| / ||B||
  double max_mhb_residual = 0.0;  // max_k ||M H B - I||
  double max_asymmetry = 0.0;     // max_k ||P - P^T|| / ||P||
  double worst_psd_ratio = 0.0;   // max_k (-lambda_min(P) / ||P||), <= 0 when PD
  long ill_conditioned_steps = 0;
};

struct RunResult {
  Trajectory trajectory;
  std::vector<Vector> x_hat;       // steps entries, x_hat_{k|k}
  std::vector<Matrix> p;           // steps entries, P_{k|k}
  std::vector<Vector> f_hat;       // steps - 1 entries
  std::vector<Vector> f_err;       // f_hat_k - f_k
  std::vector<Matrix> mse_theory;  // epsilon^2_{f_k}
  std::vector<Matrix> mse_lower_bound;
  RunDiagnostics diagnostics;
};

RunResult run_single(const DiscreteModel& dm, const ForceSignal& signal, const FilterInit& init,
                     const Vector& x0, long steps, std::uint64_t seed, std::uint64_t run = 0);

/// Arithmetic mean. Throws DomainError for an empty series.
double time_average_bias(std::span<const double> errors);

/// Component `i` of a vector series.
std::vector<double> component(const std::vector<Vector>& series, Eigen::Index i);

struct MonteCarloOptions {
  bool parallel = true;
  bool identical_seeds = false;  // every run reuses run index 0 (debug)
  long steady_state_start = 50;
};

struct MonteCarloReport {
  long n_runs = 0;
  long steps = 0;
  long steady_state_start = 0;
  std::uint64_t base_seed = 0;
  std::vector<Matrix> mse_theory;    // steps - 1, epsilon^2_{f_k} (identical in every run)
  std::vector<Vector> v_numerical;   // steps - 1, per-component mean of (f - f_hat)^2
  std::vector<Matrix> mse_numerical; // steps - 1, mean of (f_hat - f)(f_hat - f)^T
  std::vector<Vector> ratio;         // steps - 1, v_numerical / diag(mse_theory)
  std::vector<Vector> bias_f;        // steps - 1, mean of f_hat - f
  std::vector<Vector> bias_x;        // steps, mean of x - x_hat
  std::vector<Matrix> p;             // steps, P_{k|k} from run 0
  double grand_average_ratio = 0.0;  // mean of ratio over k >= steady_state_start
  RunDiagnostics diagnostics;        // worst case over all runs
};

/// Throws DomainError when n_runs < 2.
MonteCarloReport monte_carlo(const DiscreteModel& dm, const ForceSignal& signal,
                             const FilterInit& init, const Vector& x0, long steps, long n_runs,
                             std::uint64_t base_seed, const MonteCarloOptions& options = {});

}  // namespace forcetrack
