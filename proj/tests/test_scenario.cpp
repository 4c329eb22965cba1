#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <variant>

#include "forcetrack/errors.hpp"
#include "forcetrack/scenario.hpp"

using namespace forcetrack;
using nlohmann::json;

namespace {

const std::filesystem::path kScenarios = FORCETRACK_SOURCE_DIR "/scenarios";

json minimal() {
  return json::parse(R"({
    "model": {"kind": "optomechanical", "mass": 5.88e-4, "omega_m": 1.76e5,
              "noise_intensity": 1e-14},
    "discretization": {"dt": 1e-4},
    "force": {"kind": "constant", "value": 2.0}
  })");
}

json matrices() {
  json doc = minimal();
  doc["model"] = json::parse(R"({"kind": "matrices",
    "A0": [[0, 1], [-1, 0]], "B0": [[0], [1]], "H0": [[1, 0]],
    "Q0": [[0, 0], [0, 1]], "R0": [[1]]})");
  return doc;
}

}  // namespace

TEST_CASE("bundled scenario") {
  const Scenario s = load_scenario(kScenarios / "optomechanical.json");
  CHECK(s.model_kind == Scenario::ModelKind::kOptomechanical);
  CHECK(s.opto.mass == 5.88e-4);
  CHECK(s.opto.omega_m == 1.76e5);
  CHECK(s.opto.noise_intensity == 1e-14);
  CHECK(s.dt == 1e-4);
  CHECK(s.steps == 1000);
  CHECK(s.n_runs == 100);
  CHECK(s.initial_state == Vector::Constant(2, 1e-6));
  CHECK(s.filter.mode == FilterInit::Mode::kTruth);
  CHECK(s.filter.p0_scale == 1e-10);
  REQUIRE(std::holds_alternative<force::GaussianIid>(s.force));
  CHECK(std::get<force::GaussianIid>(s.force).mean == 1.0);
  CHECK(std::get<force::GaussianIid>(s.force).variance == 0.5);
  CHECK(validate(s.continuous_model()).empty());
}

TEST_CASE("defaults") {
  const Scenario s = parse_scenario(minimal());
  CHECK(s.steps == 1000);
  CHECK(s.seed == 1);
  CHECK(s.n_runs == 100);
  CHECK(s.steady_state_start == 50);
  CHECK_FALSE(s.identical_seeds);
  CHECK(s.initial_state.size() == 0);
  CHECK(s.output_dir == ".");
  CHECK(s.filter.mode == FilterInit::Mode::kTruth);
}

TEST_CASE("force kinds") {
  json doc = minimal();
  doc["force"] = {{"kind", "sinusoid"}, {"amplitude", 2.0}, {"angular_frequency", 30.0}};
  const auto sin = std::get<force::Sinusoid>(parse_scenario(doc).force);
  CHECK(sin.amplitude == 2.0);
  CHECK(sin.angular_frequency == 30.0);
  CHECK(sin.phase == 0.0);

  doc["force"] = json::parse(
      R"({"kind": "piecewise", "segments": [{"start": 0, "value": 1}, {"start": 10, "value": -1}]})");
  const auto pw = std::get<force::Piecewise>(parse_scenario(doc).force);
  REQUIRE(pw.segments.size() == 2);
  CHECK(pw.segments[1].start == 10);

  const auto dir = std::filesystem::temp_directory_path() / "forcetrack_scn";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "f.txt") << "0.5\n0.25\n";
  doc["force"] = {{"kind", "from_file"}, {"path", "f.txt"}};
  const auto ff = std::get<force::FromFile>(parse_scenario(doc, dir).force);
  REQUIRE(ff.values.size() == 2);
  CHECK(ff.values[0] == std::vector<double>{0.5});
  CHECK(ff.values[1] == std::vector<double>{0.25});

  doc["force"] = {{"kind", "gaussian_iid"}, {"mean", 0.0}, {"variance", -1.0}};
  CHECK_THROWS(parse_scenario(doc));
  doc["force"] = {{"kind", "ramp"}};
  CHECK_THROWS_WITH_AS(parse_scenario(doc), doctest::Contains("force.kind"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("missing dt names the field") {
  json doc = minimal();
  doc["discretization"].erase("dt");
  CHECK_THROWS_WITH_AS(parse_scenario(doc), doctest::Contains("discretization.dt"), ConfigError);
  doc.erase("discretization");
  CHECK_THROWS_WITH_AS(parse_scenario(doc), doctest::Contains("discretization"), ConfigError);
  doc = minimal();
  doc["discretization"]["dt"] = "fast";
  CHECK_THROWS_WITH_AS(parse_scenario(doc), doctest::Contains("discretization.dt"), ConfigError);
  doc["discretization"]["dt"] = 0.0;
  CHECK_THROWS_AS(parse_scenario(doc), ConfigError);
}

TEST_CASE("D = 0 fails model validation") {
  json doc = minimal();
  doc["model"]["noise_intensity"] = 0.0;
  const Scenario s = parse_scenario(doc);
  CHECK_THROWS_WITH(s.continuous_model(), doctest::Contains("R0 not positive definite"));
}

TEST_CASE("syntax errors report the line") {
  const std::string text = "{\n  \"model\": {\n    \"kind\": \"optomechanical\",,\n  }\n}\n";
  CHECK_THROWS_WITH_AS(parse_scenario_text(text), doctest::Contains("line 3"), ConfigError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), IoError);
}

TEST_CASE("matrix models") {
  const Scenario s = parse_scenario(matrices());
  CHECK(s.model_kind == Scenario::ModelKind::kMatrices);
  CHECK(s.continuous_model().a0(1, 0) == -1.0);
  CHECK(s.continuous_model().h0.rows() == 1);

  json bad = matrices();
  bad["model"]["A0"] = json::parse("[[0, 1], [-1]]");
  CHECK_THROWS_AS(parse_scenario(bad), DimensionError);
  bad = matrices();
  bad["model"]["B0"] = json::parse("[[0], [1], [2]]");
  CHECK_THROWS_WITH_AS(parse_scenario(bad), doctest::Contains("model.B0"), DimensionError);
  bad = matrices();
  bad["model"]["R0"] = json::parse("[[1, 0], [0, 1]]");
  CHECK_THROWS_WITH_AS(parse_scenario(bad), doctest::Contains("model.R0"), DimensionError);
}

TEST_CASE("echo round-trips") {
  json doc = matrices();
  doc["force"] = json::parse(
      R"({"kind": "piecewise", "segments": [{"start": 0, "value": 0.1}, {"start": 7, "value": 3}]})");
  doc["filter"] = {{"init", "explicit"}, {"x0_hat", {0.5, -0.25}}, {"p0_scale", 0.3}};
  doc["experiment"] = {{"steps", 12},
                       {"seed", 18446744073709551615ULL},
                       {"n_runs", 9},
                       {"initial_state", {1.0 / 3.0, 2.0}},
                       {"identical_seeds", true}};
  doc["output"] = {{"dir", "results"}};

  for (const json& src : {doc, minimal()}) {
    const Scenario a = parse_scenario(src);
    const json echo = to_json(a);
    const Scenario b = parse_scenario(json::parse(echo.dump()));
    CHECK(to_json(b) == echo);
    CHECK(b.seed == a.seed);
    CHECK(b.initial_state == a.initial_state);
    CHECK(b.filter.x0_hat == a.filter.x0_hat);
    CHECK(b.continuous_model().a0 == a.continuous_model().a0);
  }
  CHECK(parse_scenario(doc).seed == 18446744073709551615ULL);
}
