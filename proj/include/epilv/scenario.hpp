#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "epilv/analysis.hpp"
#include "epilv/control.hpp"
#include "epilv/model.hpp"
#include "epilv/params.hpp"

namespace epilv::scenario {

using json = nlohmann::ordered_json;

enum class ModelForm { Dimensional, Dimensionless };

/// Raised for malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  ModelForm form = ModelForm::Dimensional;
  std::optional<DimensionalParams> dim_params;
  std::optional<DimensionlessParams> nd_params;
  double S_h0 = 0, I_h0 = 0, R_h0 = 0, S_v0 = 0, I_v0 = 0, D0 = 0;
  double horizon = 120.0;
  control::CostWeights weights; // T mirrors horizon when used
  control::SweepOptions sweep;  // tolerances apply to the dimensionless sweep
  SolverOptions solver;
  std::vector<double> k0;
  std::string output_dir = "out";
  std::string notes;

  /// Parses a config document; also accepts a summary.json produced by a
  /// previous run (the echoed "config" object is used). Unknown keys are
  /// rejected by name.
  static ScenarioConfig from_json(const json& doc);
  static ScenarioConfig from_file(const std::string& path);

  /// Fully resolved config with defaults filled in.
  json to_json() const;

  DimensionlessParams dimensionless_params() const;
  const char* units_tag() const {
    return form == ModelForm::Dimensional ? "dimensional" : "dimensionless";
  }
};

/// Applies a dot-path override such as "weights.c=0" to a config document.
void apply_override(json& doc, const std::string& spec);

/// u == 0 run; writes timeseries.csv and summary.json, returns the summary.
json run_simulate(const ScenarioConfig& cfg, const std::string& out_dir);

/// Equilibria, thresholds and level-set report; writes analysis.json.
json run_analyze(const ScenarioConfig& cfg, const std::string& out_dir);

/// Forward-backward sweep run; writes timeseries.csv, uncontrolled.csv,
/// adjoint.csv and summary.json.
json run_optimize(const ScenarioConfig& cfg, const std::string& out_dir);

/// Side-by-side optimize runs of two configs sharing a model form; writes
/// compare.json.
json run_compare(const ScenarioConfig& a, const ScenarioConfig& b, const std::string& out_dir);

/// Composite-Simpson quadrature on a uniform grid (even interval count).
double simpson(const std::vector<double>& values, double step);

} // namespace epilv::scenario
