#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "epilv/scenario.hpp"

using namespace epilv;
using namespace epilv::scenario;

namespace {

json base_doc() {
  return json::parse(R"({
    "model": "dimensional",
    "params": {"mu_h": 3.4e-5, "mu_v": 0.0125, "mu_D": 0.15, "gamma": 0.14,
               "alpha": 0.3, "eta": 0.1, "b": 0.7, "beta_h": 0.45, "beta_v": 0.55, "N_h": 10},
    "initial_state": {"S_h": 9, "I_h": 1, "R_h": 0, "S_v": 9, "I_v": 1, "D": 0.1},
    "horizon": 120,
    "k0": [-3]
  })");
}

json nd_doc() {
  return json::parse(R"({
    "model": "dimensionless",
    "params": {"B_h": 3.78, "B_v": 30.8, "mu_h": 0.00272, "gamma": 11.2, "mu_D": 12.0},
    "initial_state": {"S_h": 1, "I_h": 0, "S_v": 1, "I_v": 0, "D": 1},
    "horizon": 2.0,
    "sweep": {"grid_size": 200}
  })");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("epilv_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

} // namespace

TEST_CASE("defaults are filled in and echoed back") {
  const auto cfg = ScenarioConfig::from_json(base_doc());
  CHECK(cfg.form == ModelForm::Dimensional);
  CHECK(cfg.horizon == 120.0);
  CHECK(cfg.weights.c == 1.0);
  CHECK(cfg.sweep.grid_size == 2000);
  CHECK(cfg.solver.rel_tol == 1e-8);
  CHECK(cfg.output_dir == "out");

  const json echoed = cfg.to_json();
  CHECK(echoed["weights"]["u_max"] == 0.5);
  CHECK(echoed["sweep"]["relaxation"] == 0.1);
  // The echo parses back to the same resolved config.
  const auto again = ScenarioConfig::from_json(echoed);
  CHECK(again.to_json() == echoed);
}

TEST_CASE("unknown keys are rejected by name") {
  auto doc = base_doc();
  doc["params"]["sigma"] = 1.0;
  CHECK_THROWS_WITH_AS(static_cast<void>(ScenarioConfig::from_json(doc)),
                       "config: unknown key 'sigma' in params", ConfigError);
  doc = base_doc();
  doc["frobnicate"] = true;
  CHECK_THROWS_WITH_AS(static_cast<void>(ScenarioConfig::from_json(doc)),
                       "config: unknown key 'frobnicate' in top level", ConfigError);
}

TEST_CASE("parameterization must match the model form") {
  auto doc = base_doc();
  doc["model"] = "dimensionless";
  CHECK_THROWS_AS(static_cast<void>(ScenarioConfig::from_json(doc)), ConfigError);
  auto ndd = nd_doc();
  ndd["initial_state"]["R_h"] = 0.0;
  CHECK_THROWS_AS(static_cast<void>(ScenarioConfig::from_json(ndd)), ConfigError);
}

TEST_CASE("invalid values are reported with the field name") {
  auto doc = base_doc();
  doc["params"]["eta"] = -1.0;
  try {
    static_cast<void>(ScenarioConfig::from_json(doc));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("eta") != std::string::npos);
  }
}

TEST_CASE("dot-path overrides") {
  auto doc = base_doc();
  apply_override(doc, "weights.c=0");
  apply_override(doc, "horizon=30");
  apply_override(doc, "notes=short run");
  const auto cfg = ScenarioConfig::from_json(doc);
  CHECK(cfg.weights.c == 0.0);
  CHECK(cfg.horizon == 30.0);
  CHECK(cfg.notes == "short run");
  CHECK_THROWS_AS(apply_override(doc, "nonsense"), ConfigError);
}

TEST_CASE("simpson rule is exact on cubics") {
  const int n = 10;
  std::vector<double> v;
  const double h = 0.3;
  for (int i = 0; i <= n; ++i) {
    const double x = i * h;
    v.push_back(x * x * x - 2.0 * x + 1.0);
  }
  const double L = n * h;
  const double exact = L * L * L * L / 4.0 - L * L + L;
  CHECK(simpson(v, h) == doctest::Approx(exact).epsilon(1e-14));
  CHECK_THROWS_AS(simpson(std::vector<double>(4, 1.0), 0.1), std::invalid_argument);
}

TEST_CASE("simulate writes the CSV contract") {
  auto doc = base_doc();
  doc["sweep"] = {{"grid_size", 100}};
  const auto cfg = ScenarioConfig::from_json(doc);
  const auto dir = fresh_dir("sim");
  const json summary = run_simulate(cfg, dir.string());

  const std::string csv = slurp(dir / "timeseries.csv");
  CHECK(csv.rfind("t,S_h,I_h,R_h,S_v,I_v,D,u\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);
  // 1 header + grid_size + 1 rows.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 102);

  CHECK(summary["units"] == "dimensional");
  CHECK(summary["R0"].get<double>() == doctest::Approx(3.2237363590939005));
  // The epidemic peaks above the initial prevalence.
  CHECK(summary["peak_I_h"]["uncontrolled"]["value"].get<double>() > 1.0);
  // The echoed config reproduces the run configuration.
  const auto rt = ScenarioConfig::from_json(summary);
  CHECK(rt.to_json() == cfg.to_json());
}

TEST_CASE("dimensionless simulate leaves R_h blank and equilibria constant") {
  const auto cfg = ScenarioConfig::from_json(nd_doc()); // starts at E2
  const auto dir = fresh_dir("sim_nd");
  const json summary = run_simulate(cfg, dir.string());
  CHECK(summary["units"] == "dimensionless");

  std::ifstream f(dir / "timeseries.csv");
  std::string line;
  std::getline(f, line); // header
  int rows = 0;
  while (std::getline(f, line)) {
    ++rows;
    std::vector<std::string> cells;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 8);
    CHECK(cells[3].empty()); // R_h column
    CHECK(std::stod(cells[1]) == doctest::Approx(1.0).epsilon(1e-9)); // S_h stays put
    CHECK(std::stod(cells[6]) == doctest::Approx(1.0).epsilon(1e-9)); // D stays put
  }
  CHECK(rows == 201);
}

TEST_CASE("analyze reports thresholds and level sets") {
  const auto cfg = ScenarioConfig::from_json(base_doc());
  const auto dir = fresh_dir("ana");
  const json rep = run_analyze(cfg, dir.string());
  CHECK(rep["level_sets"].size() == 1);
  CHECK(rep["level_sets"][0]["eco_r0"].get<double>() == doctest::Approx(206.1658567518).epsilon(1e-9));
  CHECK(rep["level_sets"][0]["metzler_stable"] == false);
  CHECK(rep["equilibria"].size() == 3);
  CHECK(std::filesystem::exists(dir / "analysis.json"));
}

TEST_CASE("optimize writes all artifacts and improves the objective") {
  auto doc = base_doc();
  doc["horizon"] = 30;
  doc["sweep"] = {{"grid_size", 500}};
  const auto cfg = ScenarioConfig::from_json(doc);
  const auto dir = fresh_dir("opt");
  const json summary = run_optimize(cfg, dir.string());

  CHECK(summary["converged"] == true);
  CHECK(summary["J_optimal"].get<double>() < summary["J_uncontrolled"].get<double>());
  CHECK(summary["peak_I_h"]["controlled"]["value"].get<double>() <
        summary["peak_I_h"]["uncontrolled"]["value"].get<double>());
  CHECK(summary["objective_history"].size() ==
        static_cast<std::size_t>(summary["iterations"].get<int>()));
  for (const char* name : {"timeseries.csv", "uncontrolled.csv", "adjoint.csv", "summary.json"})
    CHECK(std::filesystem::exists(dir / name));

  const std::string adj = slurp(dir / "adjoint.csv");
  CHECK(adj.rfind("t,p1,p2,p3,p4,p5\n", 0) == 0);
}

TEST_CASE("compare requires matching model forms") {
  const auto a = ScenarioConfig::from_json(base_doc());
  const auto b = ScenarioConfig::from_json(nd_doc());
  CHECK_THROWS_AS(static_cast<void>(run_compare(a, b, fresh_dir("cmp_bad").string())),
                  ConfigError);
}

TEST_CASE("compare of identical configs has zero diffs") {
  auto doc = base_doc();
  doc["horizon"] = 30;
  doc["sweep"] = {{"grid_size", 200}};
  const auto cfg = ScenarioConfig::from_json(doc);
  const auto dir = fresh_dir("cmp");
  const json rep = run_compare(cfg, cfg, dir.string());
  for (const auto& [key, val] : rep["diff"].items()) CHECK(val.get<double>() == 0.0);
  CHECK(rep["a"]["horizon"] == rep["b"]["horizon"]);
}
