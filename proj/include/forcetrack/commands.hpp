#pragma once

// Implementation of the `forcetrack` subcommands. tools/forcetrack_cli.cpp
// only parses arguments and maps exceptions to exit codes.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "forcetrack/experiment.hpp"
#include "forcetrack/scenario.hpp"

namespace forcetrack {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitModel = 2,
  kExitIo = 3,
};

/// Maps a thrown exception to the CLI exit code.
int exit_code_for(const std::exception& e);

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> runs;
  std::optional<std::filesystem::path> out_dir;
  bool identical_seeds = false;
  bool serial = false;
};

void apply_overrides(Scenario& scenario, const Overrides& overrides);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Header of run.csv for a model with the given dimensions. The optomechanical
/// shape (n=2, m=1, p=1) gives k,t,q_true,p_true,q_est,p_est,y,f_true,f_est,f_err,mse_theory.
std::vector<std::string> run_csv_columns(Eigen::Index n, Eigen::Index m, Eigen::Index p);

/// Header of accuracy.csv: k,t,mse_theory,v_numerical,ratio,bias_f (indexed per
/// force component when m > 1).
std::vector<std::string> accuracy_csv_columns(Eigen::Index m);

void write_run_csv(std::ostream& out, const RunResult& run, const DiscreteModel& dm);
nlohmann::json run_summary(const RunResult& run, const Scenario& scenario);

void write_accuracy_csv(std::ostream& out, const MonteCarloReport& report,
                        const DiscreteModel& dm);
nlohmann::json montecarlo_summary(const MonteCarloReport& report, const Scenario& scenario);

/// Writes run.csv and summary.json into scenario.output_dir.
RunResult cmd_run(const Scenario& scenario);

/// Writes accuracy.csv and summary.json into scenario.output_dir.
/// Throws ConfigError when n_runs < 2.
MonteCarloReport cmd_montecarlo(const Scenario& scenario, bool parallel = true);

/// Prints A, B, H, Q, R with 17 significant digits.
DiscreteModel cmd_discretize(const Scenario& scenario, std::ostream& out);

}  // namespace forcetrack
