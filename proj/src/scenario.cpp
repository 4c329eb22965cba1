#include "forcetrack/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "forcetrack/errors.hpp"

namespace forcetrack {
namespace {

using nlohmann::json;

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) {
    throw ConfigError("field '" + path + "' must be an object");
  }
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ConfigError("missing required field '" + (path.empty() ? key : path + "." + key) + "'");
  }
  return *it;
}

const json* optional_field(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError("field '" + path + "' must be a number");
  return v.get<double>();
}

long as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ConfigError("field '" + path + "' must be an integer");
  return v.get<long>();
}

std::uint64_t as_seed(const json& v, const std::string& path) {
  if (!v.is_number_unsigned()) {
    throw ConfigError("field '" + path + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw ConfigError("field '" + path + "' must be true or false");
  return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError("field '" + path + "' must be a string");
  return v.get<std::string>();
}

Vector as_vector(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError("field '" + path + "' must be a non-empty array");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = as_number(v[i], path + "[" + std::to_string(i) + "]");
  }
  return out;
}

// Row-major nested arrays, all rows the same length.
Matrix as_matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) {
    throw ConfigError("field '" + path + "' must be a non-empty array of rows");
  }
  const std::size_t rows = v.size();
  if (!v[0].is_array() || v[0].empty()) {
    throw ConfigError("field '" + path + "' rows must be non-empty arrays");
  }
  const std::size_t cols = v[0].size();
  Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != cols) {
      throw DimensionError("field '" + row_path + "' must have " + std::to_string(cols) +
                           " entries");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          as_number(v[i][j], row_path + "[" + std::to_string(j) + "]");
    }
  }
  return out;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

ForceSignal parse_force(const json& f, const std::filesystem::path& base_dir) {
  const std::string kind = as_string(require(f, "kind", "force"), "force.kind");
  ForceSignal signal;
  if (kind == "constant") {
    signal = force::Constant{as_number(require(f, "value", "force"), "force.value")};
  } else if (kind == "sinusoid") {
    force::Sinusoid s;
    s.amplitude = as_number(require(f, "amplitude", "force"), "force.amplitude");
    s.angular_frequency =
        as_number(require(f, "angular_frequency", "force"), "force.angular_frequency");
    if (const json* ph = optional_field(f, "phase")) s.phase = as_number(*ph, "force.phase");
    signal = s;
  } else if (kind == "gaussian_iid") {
    force::GaussianIid g;
    g.mean = as_number(require(f, "mean", "force"), "force.mean");
    g.variance = as_number(require(f, "variance", "force"), "force.variance");
    signal = g;
  } else if (kind == "piecewise") {
    const json& segs = require(f, "segments", "force");
    if (!segs.is_array() || segs.empty()) {
      throw ConfigError("field 'force.segments' must be a non-empty array");
    }
    force::Piecewise p;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const std::string path = "force.segments[" + std::to_string(i) + "]";
      const json& seg = segs[i];
      p.segments.push_back({as_integer(require(seg, "start", path), path + ".start"),
                            as_number(require(seg, "value", path), path + ".value")});
    }
    signal = p;
  } else if (kind == "from_file") {
    std::filesystem::path path = as_string(require(f, "path", "force"), "force.path");
    if (path.is_relative()) path = base_dir / path;
    signal = load_force_file(path);
  } else {
    throw ConfigError("field 'force.kind' has unknown value '" + kind + "'");
  }
  try {
    validate_force(signal);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("force: ") + e.what());
  }
  return signal;
}

json force_json(const ForceSignal& signal) {
  struct Visitor {
    json operator()(const force::Constant& c) const {
      return {{"kind", "constant"}, {"value", c.value}};
    }
    json operator()(const force::Sinusoid& s) const {
      return {{"kind", "sinusoid"},
              {"amplitude", s.amplitude},
              {"angular_frequency", s.angular_frequency},
              {"phase", s.phase}};
    }
    json operator()(const force::GaussianIid& g) const {
      return {{"kind", "gaussian_iid"}, {"mean", g.mean}, {"variance", g.variance}};
    }
    json operator()(const force::Piecewise& p) const {
      json segs = json::array();
      for (const auto& s : p.segments) segs.push_back({{"start", s.start}, {"value", s.value}});
      return {{"kind", "piecewise"}, {"segments", segs}};
    }
    json operator()(const force::FromFile& f) const {
      return {{"kind", "from_file"}, {"path", f.path.string()}};
    }
  };
  return std::visit(Visitor{}, signal);
}

std::pair<long, long> line_and_column(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  long line = 1;
  long column = 1;
  for (std::size_t i = 0; i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

ContinuousModel Scenario::continuous_model() const {
  if (model_kind == ModelKind::kOptomechanical) return build_optomechanical(opto);
  return matrices;
}

Scenario parse_scenario(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("scenario must be a JSON object");
  Scenario s;

  const json& model = require(doc, "model", "");
  const std::string kind = as_string(require(model, "kind", "model"), "model.kind");
  if (kind == "optomechanical") {
    s.model_kind = Scenario::ModelKind::kOptomechanical;
    s.opto.mass = as_number(require(model, "mass", "model"), "model.mass");
    s.opto.omega_m = as_number(require(model, "omega_m", "model"), "model.omega_m");
    s.opto.noise_intensity =
        as_number(require(model, "noise_intensity", "model"), "model.noise_intensity");
  } else if (kind == "matrices") {
    s.model_kind = Scenario::ModelKind::kMatrices;
    s.matrices.a0 = as_matrix(require(model, "A0", "model"), "model.A0");
    s.matrices.b0 = as_matrix(require(model, "B0", "model"), "model.B0");
    s.matrices.h0 = as_matrix(require(model, "H0", "model"), "model.H0");
    s.matrices.q0 = as_matrix(require(model, "Q0", "model"), "model.Q0");
    s.matrices.r0 = as_matrix(require(model, "R0", "model"), "model.R0");
    const ContinuousModel& c = s.matrices;
    const Eigen::Index n = c.a0.rows();
    const auto shape = [](const Matrix& m) {
      return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
    };
    if (c.a0.cols() != n) throw DimensionError("field 'model.A0' must be square, got " + shape(c.a0));
    if (c.b0.rows() != n) {
      throw DimensionError("field 'model.B0' must have " + std::to_string(n) + " rows, got " +
                           shape(c.b0));
    }
    if (c.h0.cols() != n) {
      throw DimensionError("field 'model.H0' must have " + std::to_string(n) + " columns, got " +
                           shape(c.h0));
    }
    if (c.q0.rows() != n || c.q0.cols() != n) {
      throw DimensionError("field 'model.Q0' must be " + shape(c.a0) + ", got " + shape(c.q0));
    }
    if (c.r0.rows() != c.h0.rows() || c.r0.cols() != c.h0.rows()) {
      throw DimensionError("field 'model.R0' must be " + std::to_string(c.h0.rows()) + "x" +
                           std::to_string(c.h0.rows()) + ", got " + shape(c.r0));
    }
  } else {
    throw ConfigError("field 'model.kind' has unknown value '" + kind + "'");
  }

  const json& disc = require(doc, "discretization", "");
  s.dt = as_number(require(disc, "dt", "discretization"), "discretization.dt");
  if (!(s.dt > 0.0)) throw ConfigError("field 'discretization.dt' must be positive");

  s.force = parse_force(require(doc, "force", ""), base_dir);

  if (const json* filter = optional_field(doc, "filter")) {
    if (const json* init = optional_field(*filter, "init")) {
      const std::string mode = as_string(*init, "filter.init");
      if (mode == "truth") {
        s.filter.mode = FilterInit::Mode::kTruth;
      } else if (mode == "measurement") {
        s.filter.mode = FilterInit::Mode::kMeasurement;
      } else if (mode == "explicit") {
        s.filter.mode = FilterInit::Mode::kExplicit;
        s.filter.x0_hat = as_vector(require(*filter, "x0_hat", "filter"), "filter.x0_hat");
      } else {
        throw ConfigError("field 'filter.init' has unknown value '" + mode + "'");
      }
    }
    if (const json* scale = optional_field(*filter, "p0_scale")) {
      s.filter.p0_scale = as_number(*scale, "filter.p0_scale");
      if (!(s.filter.p0_scale >= 0.0)) throw ConfigError("field 'filter.p0_scale' must be >= 0");
    }
  }

  if (const json* exp = optional_field(doc, "experiment")) {
    if (const json* v = optional_field(*exp, "steps")) s.steps = as_integer(*v, "experiment.steps");
    if (const json* v = optional_field(*exp, "seed")) s.seed = as_seed(*v, "experiment.seed");
    if (const json* v = optional_field(*exp, "n_runs")) {
      s.n_runs = as_integer(*v, "experiment.n_runs");
    }
    if (const json* v = optional_field(*exp, "initial_state")) {
      s.initial_state = as_vector(*v, "experiment.initial_state");
    }
    if (const json* v = optional_field(*exp, "steady_state_start")) {
      s.steady_state_start = as_integer(*v, "experiment.steady_state_start");
    }
    if (const json* v = optional_field(*exp, "identical_seeds")) {
      s.identical_seeds = as_bool(*v, "experiment.identical_seeds");
    }
  }
  if (s.steps < 2) throw ConfigError("field 'experiment.steps' must be >= 2");
  if (s.n_runs < 1) throw ConfigError("field 'experiment.n_runs' must be >= 1");

  if (const json* out = optional_field(doc, "output")) {
    if (const json* dir = optional_field(*out, "dir")) s.output_dir = as_string(*dir, "output.dir");
  }
  return s;
}

Scenario parse_scenario_text(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte);
    throw ConfigError("parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + e.what());
  }
  return parse_scenario(doc, base_dir);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path.parent_path());
}

json to_json(const Scenario& s) {
  json doc;
  if (s.model_kind == Scenario::ModelKind::kOptomechanical) {
    doc["model"] = {{"kind", "optomechanical"},
                    {"mass", s.opto.mass},
                    {"omega_m", s.opto.omega_m},
                    {"noise_intensity", s.opto.noise_intensity}};
  } else {
    doc["model"] = {{"kind", "matrices"},
                    {"A0", matrix_json(s.matrices.a0)},
                    {"B0", matrix_json(s.matrices.b0)},
                    {"H0", matrix_json(s.matrices.h0)},
                    {"Q0", matrix_json(s.matrices.q0)},
                    {"R0", matrix_json(s.matrices.r0)}};
  }
  doc["discretization"] = {{"dt", s.dt}};
  doc["force"] = force_json(s.force);

  json filter = {{"p0_scale", s.filter.p0_scale}};
  switch (s.filter.mode) {
    case FilterInit::Mode::kTruth: filter["init"] = "truth"; break;
    case FilterInit::Mode::kMeasurement: filter["init"] = "measurement"; break;
    case FilterInit::Mode::kExplicit:
      filter["init"] = "explicit";
      filter["x0_hat"] = vector_json(s.filter.x0_hat);
      break;
  }
  doc["filter"] = filter;

  json exp = {{"steps", s.steps},
              {"seed", s.seed},
              {"n_runs", s.n_runs},
              {"steady_state_start", s.steady_state_start},
              {"identical_seeds", s.identical_seeds}};
  if (s.initial_state.size() > 0) exp["initial_state"] = vector_json(s.initial_state);
  doc["experiment"] = exp;
  doc["output"] = {{"dir", s.output_dir.string()}};
  return doc;
}

}  // namespace forcetrack
