#include "forcetrack/commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <system_error>

#include "forcetrack/errors.hpp"

namespace forcetrack {
namespace {

using nlohmann::json;

bool is_optomechanical_shape(Eigen::Index n, Eigen::Index m, Eigen::Index p) {
  return n == 2 && m == 1 && p == 1;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    out << fields[i];
  }
  out << '\n';
}

json scalar_or_array(const Vector& v) {
  if (v.size() == 1) return v(0);
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

void finish_file(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ExhaustionError*>(&e) ||
      dynamic_cast<const DimensionError*>(&e)) {
    return kExitConfig;
  }
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  return kExitModel;
}

void apply_overrides(Scenario& scenario, const Overrides& overrides) {
  if (overrides.seed) scenario.seed = *overrides.seed;
  if (overrides.runs) scenario.n_runs = *overrides.runs;
  if (overrides.out_dir) scenario.output_dir = *overrides.out_dir;
  if (overrides.identical_seeds) scenario.identical_seeds = true;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> run_csv_columns(Eigen::Index n, Eigen::Index m, Eigen::Index p) {
  if (is_optomechanical_shape(n, m, p)) {
    return {"k", "t", "q_true", "p_true", "q_est", "p_est", "y",
            "f_true", "f_est", "f_err", "mse_theory"};
  }
  std::vector<std::string> cols = {"k", "t"};
  const auto indexed = [&](const std::string& stem, Eigen::Index count) {
    for (Eigen::Index i = 0; i < count; ++i) cols.push_back(stem + "_" + std::to_string(i));
  };
  indexed("x_true", n);
  indexed("x_est", n);
  indexed("y", p);
  indexed("f_true", m);
  indexed("f_est", m);
  indexed("f_err", m);
  indexed("mse_theory", m);
  return cols;
}

std::vector<std::string> accuracy_csv_columns(Eigen::Index m) {
  if (m == 1) return {"k", "t", "mse_theory", "v_numerical", "ratio", "bias_f"};
  std::vector<std::string> cols = {"k", "t"};
  for (const char* stem : {"mse_theory", "v_numerical", "ratio", "bias_f"}) {
    for (Eigen::Index i = 0; i < m; ++i) cols.push_back(std::string(stem) + "_" + std::to_string(i));
  }
  return cols;
}

void write_run_csv(std::ostream& out, const RunResult& run, const DiscreteModel& dm) {
  const Eigen::Index n = dm.states();
  const Eigen::Index m = dm.inputs();
  const Eigen::Index p = dm.outputs();
  write_row(out, run_csv_columns(n, m, p));

  const auto& records = run.trajectory.records;
  std::vector<std::string> row;
  for (std::size_t k = 0; k < records.size(); ++k) {
    row.clear();
    const auto& rec = records[k];
    row.push_back(std::to_string(rec.k));
    row.push_back(format_double(rec.t));
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(format_double(rec.x_true(i)));
    for (Eigen::Index i = 0; i < n; ++i) row.push_back(format_double(run.x_hat[k](i)));
    for (Eigen::Index i = 0; i < p; ++i) row.push_back(format_double(rec.y(i)));
    const bool has_force = k < run.f_hat.size();
    for (Eigen::Index i = 0; i < m; ++i) row.push_back(has_force ? format_double(rec.f_true(i)) : "");
    for (Eigen::Index i = 0; i < m; ++i) {
      row.push_back(has_force ? format_double(run.f_hat[k](i)) : "");
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      row.push_back(has_force ? format_double(run.f_err[k](i)) : "");
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      row.push_back(has_force ? format_double(run.mse_theory[k](i, i)) : "");
    }
    write_row(out, row);
  }
}

json run_summary(const RunResult& run, const Scenario& scenario) {
  const Eigen::Index m = run.f_err.front().size();
  const std::size_t count = run.f_err.size();
  std::size_t begin = static_cast<std::size_t>(std::max(0L, scenario.steady_state_start));
  if (begin >= count) begin = 0;

  Vector bias(m), rms(m), steady(m), mean_mse(m), bound(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto errors = component(run.f_err, i);
    bias(i) = time_average_bias(errors);
    double sq = 0.0;
    for (double e : errors) sq += e * e;
    rms(i) = std::sqrt(sq / static_cast<double>(count));

    double total = 0.0;
    for (std::size_t k = 0; k < count; ++k) total += run.mse_theory[k](i, i);
    mean_mse(i) = total / static_cast<double>(count);
    bound(i) = 5.0 * std::sqrt(mean_mse(i) / static_cast<double>(scenario.steps));

    double s = 0.0;
    for (std::size_t k = begin; k < count; ++k) s += run.mse_theory[k](i, i);
    steady(i) = s / static_cast<double>(count - begin);
  }

  json out;
  out["e_t_bias"] = scalar_or_array(bias);
  out["rms_error"] = scalar_or_array(rms);
  out["steady_state_mse_theory"] = scalar_or_array(steady);
  out["mean_mse_theory"] = scalar_or_array(mean_mse);
  out["e_t_bound"] = scalar_or_array(bound);
  out["steps"] = scenario.steps;
  out["seed"] = scenario.seed;
  out["max_lhb_residual"] = run.diagnostics.max_lhb_residual;
  out["max_mhb_residual"] = run.diagnostics.max_mhb_residual;
  out["config"] = to_json(scenario);
  return out;
}

void write_accuracy_csv(std::ostream& out, const MonteCarloReport& report,
                        const DiscreteModel& dm) {
  const Eigen::Index m = dm.inputs();
  write_row(out, accuracy_csv_columns(m));
  std::vector<std::string> row;
  for (std::size_t k = 0; k < report.v_numerical.size(); ++k) {
    row.clear();
    row.push_back(std::to_string(k));
    row.push_back(format_double(static_cast<double>(k) * dm.dt));
    for (Eigen::Index i = 0; i < m; ++i) row.push_back(format_double(report.mse_theory[k](i, i)));
    for (Eigen::Index i = 0; i < m; ++i) row.push_back(format_double(report.v_numerical[k](i)));
    for (Eigen::Index i = 0; i < m; ++i) row.push_back(format_double(report.ratio[k](i)));
    for (Eigen::Index i = 0; i < m; ++i) row.push_back(format_double(report.bias_f[k](i)));
    write_row(out, row);
  }
}

json montecarlo_summary(const MonteCarloReport& report, const Scenario& scenario) {
  const std::size_t count = report.bias_f.size();
  std::size_t begin = static_cast<std::size_t>(std::max(0L, report.steady_state_start));
  if (begin >= count) begin = 0;
  const Eigen::Index m = report.bias_f.front().size();

  Vector mean_bias = Vector::Zero(m);
  long inside = 0;
  long total = 0;
  for (std::size_t k = begin; k < count; ++k) {
    mean_bias += report.bias_f[k];
    for (Eigen::Index i = 0; i < m; ++i) {
      const double band =
          4.0 * std::sqrt(report.mse_theory[k](i, i) / static_cast<double>(report.n_runs));
      inside += std::abs(report.bias_f[k](i)) <= band ? 1 : 0;
      ++total;
    }
  }
  mean_bias /= static_cast<double>(count - begin);

  json out;
  out["n_runs"] = report.n_runs;
  out["steps"] = report.steps;
  out["steady_state_start"] = report.steady_state_start;
  out["grand_average_ratio"] = report.grand_average_ratio;
  out["mean_bias_f"] = scalar_or_array(mean_bias);
  out["bias_within_4_sigma_fraction"] =
      total > 0 ? static_cast<double>(inside) / static_cast<double>(total) : 0.0;
  out["seed"] = scenario.seed;
  out["identical_seeds"] = scenario.identical_seeds;
  out["max_lhb_residual"] = report.diagnostics.max_lhb_residual;
  out["max_mhb_residual"] = report.diagnostics.max_mhb_residual;
  out["config"] = to_json(scenario);
  return out;
}

namespace {

Vector truth_start(const Scenario& scenario, const DiscreteModel& dm) {
  if (scenario.initial_state.size() == 0) return Vector::Zero(dm.states());
  if (scenario.initial_state.size() != dm.states()) {
    throw ConfigError("field 'experiment.initial_state' must have " +
                      std::to_string(dm.states()) + " entries");
  }
  return scenario.initial_state;
}

void write_json(const json& doc, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << doc.dump(2) << '\n';
  finish_file(out, path);
}

}  // namespace

RunResult cmd_run(const Scenario& scenario) {
  const DiscreteModel dm = discretize(scenario.continuous_model(), scenario.dt);
  const Vector x0 = truth_start(scenario, dm);
  RunResult run = run_single(dm, scenario.force, scenario.filter, x0, scenario.steps,
                             scenario.seed);

  ensure_dir(scenario.output_dir);
  const auto csv_path = scenario.output_dir / "run.csv";
  std::ofstream csv = open_output(csv_path);
  write_run_csv(csv, run, dm);
  finish_file(csv, csv_path);
  write_json(run_summary(run, scenario), scenario.output_dir / "summary.json");
  return run;
}

MonteCarloReport cmd_montecarlo(const Scenario& scenario, bool parallel) {
  if (scenario.n_runs < 2) {
    throw ConfigError("field 'experiment.n_runs' must be >= 2 for montecarlo");
  }
  const DiscreteModel dm = discretize(scenario.continuous_model(), scenario.dt);
  const Vector x0 = truth_start(scenario, dm);
  MonteCarloOptions options;
  options.parallel = parallel;
  options.identical_seeds = scenario.identical_seeds;
  options.steady_state_start = scenario.steady_state_start;
  MonteCarloReport report = monte_carlo(dm, scenario.force, scenario.filter, x0, scenario.steps,
                                        scenario.n_runs, scenario.seed, options);

  ensure_dir(scenario.output_dir);
  const auto csv_path = scenario.output_dir / "accuracy.csv";
  std::ofstream csv = open_output(csv_path);
  write_accuracy_csv(csv, report, dm);
  finish_file(csv, csv_path);
  write_json(montecarlo_summary(report, scenario), scenario.output_dir / "summary.json");
  return report;
}

DiscreteModel cmd_discretize(const Scenario& scenario, std::ostream& out) {
  const DiscreteModel dm = discretize(scenario.continuous_model(), scenario.dt);
  const auto print = [&](const char* name, const Matrix& mat) {
    out << name << " (" << mat.rows() << "x" << mat.cols() << ")\n";
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
      for (Eigen::Index j = 0; j < mat.cols(); ++j) {
        out << (j == 0 ? "  " : " ") << std::setprecision(16) << std::scientific << mat(i, j);
      }
      out << '\n';
    }
  };
  out << "dt " << std::setprecision(16) << std::scientific << dm.dt << '\n';
  print("A", dm.a);
  print("B", dm.b);
  print("H", dm.h);
  print("Q", dm.q);
  print("R", dm.r);
  out << std::defaultfloat;
  return dm;
}

}  // namespace forcetrack
