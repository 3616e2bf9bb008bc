#include "epilv/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace epilv::scenario {

namespace {

[[noreturn]] void config_fail(const std::string& msg) { throw ConfigError("config: " + msg); }

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (key == k) ok = true;
    if (!ok) config_fail("unknown key '" + key + "' in " + where);
  }
}

double need_number(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) config_fail("missing field '" + std::string(key) + "' in " + where);
  if (!obj[key].is_number()) config_fail("field '" + std::string(key) + "' in " + where + " must be a number");
  return obj[key].get<double>();
}

double opt_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) config_fail("field '" + std::string(key) + "' must be a number");
  return obj[key].get<double>();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
}

void write_json_file(const std::string& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

struct TimeseriesRow {
  double t, S_h, I_h, S_v, I_v, D, u;
  std::optional<double> R_h;
};

void write_timeseries_csv(const std::string& path, const std::vector<TimeseriesRow>& rows) {
  std::ostringstream out;
  out << "t,S_h,I_h,R_h,S_v,I_v,D,u\n";
  for (const auto& r : rows) {
    out << fmt17(r.t) << ',' << fmt17(r.S_h) << ',' << fmt17(r.I_h) << ','
        << (r.R_h ? fmt17(*r.R_h) : std::string()) << ',' << fmt17(r.S_v) << ','
        << fmt17(r.I_v) << ',' << fmt17(r.D) << ',' << fmt17(r.u) << '\n';
  }
  write_text(path, out.str());
}

json equilibria_brief(const DimensionlessParams& nd) {
  json out = json::array();
  for (const auto& rep : analysis::classify_equilibria(nd)) {
    out.push_back({{"label", rep.label}, {"classification", rep.classification}});
  }
  return out;
}

json level_set_report(const DimensionlessParams& nd, const std::vector<double>& k0s) {
  json out = json::array();
  for (double k0 : k0s) {
    const auto lb = analysis::level_set_bounds(k0, nd);
    const auto mz = analysis::metzler_comparison(nd, k0);
    out.push_back({{"k0", lb.k0},
                   {"a", lb.a},
                   {"b", lb.b},
                   {"eco_r0", lb.eco_r0},
                   {"metzler_stable", mz.stable}});
  }
  return out;
}

struct PeakInfo {
  double value = 0.0, time = 0.0;
};

PeakInfo peak_of(const std::vector<TimeseriesRow>& rows) {
  PeakInfo p{rows.front().I_h, rows.front().t};
  for (const auto& r : rows) {
    if (r.I_h > p.value) {
      p.value = r.I_h;
      p.time = r.t;
    }
  }
  return p;
}

double cumulative_ih(const std::vector<TimeseriesRow>& rows) {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r.I_h);
  const double h = (rows.back().t - rows.front().t) / static_cast<double>(rows.size() - 1);
  return simpson(v, h);
}

double control_effort(const std::vector<TimeseriesRow>& rows) {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r.u);
  const double h = (rows.back().t - rows.front().t) / static_cast<double>(rows.size() - 1);
  return simpson(v, h);
}

// Everything the sweep needs in dimensionless variables, plus the maps to
// convert results back into the run's declared units.
struct SweepSetup {
  DimensionlessParams nd;
  State5 x0;
  control::CostWeights w;
  control::SweepOptions sweep;
  // Conversions to run units; identity for dimensionless runs.
  double time_scale = 1.0;    // run time = tau * time_scale
  double host_scale = 1.0;    // run S_h = s_h * host_scale
  double vector_scale = 1.0;
  double predator_scale = 1.0;
  double control_scale = 1.0; // run u = u_hat * control_scale
  double host_total = 0.0;    // N_h, when the run is dimensional
  bool dimensional = false;
};

SweepSetup make_sweep_setup(const ScenarioConfig& cfg) {
  SweepSetup s;
  s.sweep = cfg.sweep;
  s.sweep.solver = cfg.solver;
  s.w = cfg.weights;
  s.w.T = cfg.horizon;
  if (cfg.form == ModelForm::Dimensionless) {
    s.nd = *cfg.nd_params;
    s.x0 << cfg.S_h0, cfg.I_h0, cfg.S_v0, cfg.I_v0, cfg.D0;
    return s;
  }
  const auto ndr = nondimensionalize(*cfg.dim_params);
  const Scales& sc = ndr.scales;
  s.nd = ndr.params;
  s.dimensional = true;
  s.time_scale = 1.0 / sc.mu_v;
  s.host_scale = sc.N_h;
  s.vector_scale = sc.N_v_star;
  s.predator_scale = sc.D_star;
  s.control_scale = sc.D_star * sc.mu_v;
  s.host_total = sc.N_h;
  s.x0 << cfg.S_h0 / sc.N_h, cfg.I_h0 / sc.N_h, cfg.S_v0 / sc.N_v_star,
      cfg.I_v0 / sc.N_v_star, cfg.D0 / sc.D_star;
  // Weight map chosen so the dimensionless objective equals the dimensional
  // one value-for-value.
  s.w.c = cfg.weights.c * sc.mu_v * sc.D_star * sc.D_star;
  s.w.q = cfg.weights.q * sc.D_star;
  s.w.r = cfg.weights.r * sc.N_h / sc.mu_v;
  s.w.a = cfg.weights.a * sc.N_h;
  s.w.u_max = sc.control_to_dimensionless(cfg.weights.u_max);
  s.w.T = sc.time_to_tau(cfg.horizon);
  s.sweep.u0 = sc.control_to_dimensionless(cfg.sweep.u0);
  return s;
}

std::vector<TimeseriesRow> sample_run(const SweepSetup& s, const Trajectory& traj,
                                      const control::ControlSignal* u, int n) {
  const std::vector<double> grid = uniform_grid(0.0, s.w.T, n);
  std::vector<TimeseriesRow> rows;
  rows.reserve(grid.size());
  for (double tau : grid) {
    const State5 y = traj.value_at(tau);
    TimeseriesRow r;
    r.t = tau * s.time_scale;
    r.S_h = y[0] * s.host_scale;
    r.I_h = y[1] * s.host_scale;
    r.S_v = y[2] * s.vector_scale;
    r.I_v = y[3] * s.vector_scale;
    r.D = y[4] * s.predator_scale;
    r.u = (u ? u->value_at(tau) : 0.0) * s.control_scale;
    if (s.dimensional) r.R_h = s.host_total - r.S_h - r.I_h;
    rows.push_back(r);
  }
  return rows;
}

// Core of the optimize command, shared with compare.
struct OptimizeOutcome {
  json summary;
  std::vector<TimeseriesRow> controlled, uncontrolled;
  control::SweepResult sweep;
  SweepSetup setup;
};

OptimizeOutcome optimize_core(const ScenarioConfig& cfg) {
  SweepSetup s = make_sweep_setup(cfg);
  control::SweepResult res = control::sweep_solve(s.nd, s.w, s.x0, s.sweep);

  const control::ControlSignal zero =
      control::ControlSignal::constant(s.w.T, s.sweep.grid_size, 0.0);
  const Trajectory base = control::integrate_controlled(s.nd, zero, s.x0, s.sweep.solver);
  const double j0 = control::objective(base, zero, s.w);

  OptimizeOutcome out{{}, sample_run(s, res.state, &res.control, s.sweep.grid_size),
                      sample_run(s, base, nullptr, s.sweep.grid_size), std::move(res),
                      s};
  const auto& sw = out.sweep;

  const PeakInfo pc = peak_of(out.controlled), pu = peak_of(out.uncontrolled);
  json summary;
  summary["command"] = "optimize";
  summary["units"] = cfg.units_tag();
  summary["control_units"] =
      "u, u_max, u0 and J are stated in the run's declared units; the sweep iterates in "
      "dimensionless variables and sweep tolerances apply to the dimensionless control";
  summary["R0"] = analysis::basic_reproduction_number(s.nd);
  summary["level_sets"] = level_set_report(s.nd, cfg.k0);
  summary["equilibria"] = equilibria_brief(s.nd);
  summary["J_uncontrolled"] = j0;
  summary["J_optimal"] = sw.objective_value;
  summary["best_objective"] = sw.best_objective;
  summary["iterations"] = sw.iterations;
  summary["converged"] = sw.converged;
  summary["final_control_change"] = sw.control_change;
  summary["pointwise_residual"] = sw.pointwise_residual;
  summary["objective_history"] = sw.objective_history;
  summary["peak_I_h"] = {{"controlled", {{"value", pc.value}, {"time", pc.time}}},
                         {"uncontrolled", {{"value", pu.value}, {"time", pu.time}}}};
  summary["cumulative_I_h"] = {{"controlled", cumulative_ih(out.controlled)},
                               {"uncontrolled", cumulative_ih(out.uncontrolled)}};
  summary["control_effort"] = control_effort(out.controlled);
  summary["config"] = cfg.to_json();
  out.summary = std::move(summary);
  return out;
}

} // namespace

double simpson(const std::vector<double>& values, double step) {
  const std::size_t n = values.size() - 1;
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("simpson: need an even number of intervals");
  double acc = values.front() + values.back();
  for (std::size_t i = 1; i < n; ++i) acc += values[i] * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * step / 3.0;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) config_fail("cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(f);
  } catch (const std::exception& e) {
    config_fail("invalid JSON in '" + path + "': " + e.what());
  }
  return from_json(doc);
}

ScenarioConfig ScenarioConfig::from_json(const json& top) {
  if (!top.is_object()) config_fail("document must be a JSON object");
  // A summary.json from a previous run carries the resolved config.
  const json& doc = (top.contains("config") && top["config"].is_object()) ? top["config"] : top;

  check_keys(doc, "top level",
             {"model", "params", "initial_state", "horizon", "weights", "sweep", "solver", "k0",
              "output_dir", "notes"});

  ScenarioConfig cfg;
  if (!doc.contains("model") || !doc["model"].is_string())
    config_fail("missing or non-string field 'model'");
  const std::string form = doc["model"].get<std::string>();
  if (form == "dimensional") cfg.form = ModelForm::Dimensional;
  else if (form == "dimensionless") cfg.form = ModelForm::Dimensionless;
  else config_fail("field 'model' must be 'dimensional' or 'dimensionless'");

  if (!doc.contains("params") || !doc["params"].is_object())
    config_fail("missing object field 'params'");
  const json& pj = doc["params"];
  try {
    if (cfg.form == ModelForm::Dimensional) {
      check_keys(pj, "params",
                 {"mu_h", "mu_v", "mu_D", "gamma", "alpha", "eta", "b", "beta_h", "beta_v", "N_h"});
      DimensionalParams p;
      p.mu_h = need_number(pj, "params", "mu_h");
      p.mu_v = need_number(pj, "params", "mu_v");
      p.mu_D = need_number(pj, "params", "mu_D");
      p.gamma = need_number(pj, "params", "gamma");
      p.alpha = need_number(pj, "params", "alpha");
      p.eta = need_number(pj, "params", "eta");
      p.b = need_number(pj, "params", "b");
      p.beta_h = need_number(pj, "params", "beta_h");
      p.beta_v = need_number(pj, "params", "beta_v");
      p.N_h = need_number(pj, "params", "N_h");
      p.validate();
      cfg.dim_params = p;
    } else {
      check_keys(pj, "params", {"B_h", "B_v", "mu_h", "gamma", "mu_D"});
      DimensionlessParams p;
      p.B_h = need_number(pj, "params", "B_h");
      p.B_v = need_number(pj, "params", "B_v");
      p.mu_h = need_number(pj, "params", "mu_h");
      p.gamma = need_number(pj, "params", "gamma");
      p.mu_D = need_number(pj, "params", "mu_D");
      p.validate();
      cfg.nd_params = p;
    }
  } catch (const std::invalid_argument& e) {
    config_fail(std::string("params: ") + e.what());
  }

  if (!doc.contains("initial_state") || !doc["initial_state"].is_object())
    config_fail("missing object field 'initial_state'");
  const json& st = doc["initial_state"];
  check_keys(st, "initial_state", {"S_h", "I_h", "R_h", "S_v", "I_v", "D"});
  cfg.S_h0 = need_number(st, "initial_state", "S_h");
  cfg.I_h0 = need_number(st, "initial_state", "I_h");
  cfg.R_h0 = opt_number(st, "R_h", 0.0);
  cfg.S_v0 = need_number(st, "initial_state", "S_v");
  cfg.I_v0 = need_number(st, "initial_state", "I_v");
  cfg.D0 = need_number(st, "initial_state", "D");
  if (cfg.form == ModelForm::Dimensionless && st.contains("R_h"))
    config_fail("initial_state: R_h is only meaningful for the dimensional model");
  for (double v : {cfg.S_h0, cfg.I_h0, cfg.R_h0, cfg.S_v0, cfg.I_v0, cfg.D0})
    if (!(v >= 0.0)) config_fail("initial_state: components must be nonnegative");

  cfg.horizon = opt_number(doc, "horizon", cfg.horizon);
  if (!(cfg.horizon > 0.0)) config_fail("field 'horizon' must be positive");

  if (doc.contains("weights")) {
    const json& wj = doc["weights"];
    if (!wj.is_object()) config_fail("field 'weights' must be an object");
    check_keys(wj, "weights", {"c", "q", "r", "a", "u_max"});
    cfg.weights.c = opt_number(wj, "c", cfg.weights.c);
    cfg.weights.q = opt_number(wj, "q", cfg.weights.q);
    cfg.weights.r = opt_number(wj, "r", cfg.weights.r);
    cfg.weights.a = opt_number(wj, "a", cfg.weights.a);
    cfg.weights.u_max = opt_number(wj, "u_max", cfg.weights.u_max);
  }
  cfg.weights.T = cfg.horizon;
  try {
    cfg.weights.validate();
  } catch (const std::invalid_argument& e) {
    config_fail(std::string("weights: ") + e.what());
  }

  if (doc.contains("sweep")) {
    const json& sj = doc["sweep"];
    if (!sj.is_object()) config_fail("field 'sweep' must be an object");
    check_keys(sj, "sweep", {"relaxation", "u0", "grid_size", "tol_abs", "tol_rel", "max_iterations"});
    cfg.sweep.relaxation = opt_number(sj, "relaxation", cfg.sweep.relaxation);
    cfg.sweep.u0 = opt_number(sj, "u0", cfg.sweep.u0);
    cfg.sweep.grid_size = static_cast<int>(opt_number(sj, "grid_size", cfg.sweep.grid_size));
    cfg.sweep.tol_abs = opt_number(sj, "tol_abs", cfg.sweep.tol_abs);
    cfg.sweep.tol_rel = opt_number(sj, "tol_rel", cfg.sweep.tol_rel);
    cfg.sweep.max_iterations =
        static_cast<int>(opt_number(sj, "max_iterations", cfg.sweep.max_iterations));
  }
  try {
    cfg.sweep.validate();
  } catch (const std::invalid_argument& e) {
    config_fail(std::string("sweep: ") + e.what());
  }

  if (doc.contains("solver")) {
    const json& oj = doc["solver"];
    if (!oj.is_object()) config_fail("field 'solver' must be an object");
    check_keys(oj, "solver", {"rel_tol", "abs_tol", "initial_step", "max_steps"});
    cfg.solver.rel_tol = opt_number(oj, "rel_tol", cfg.solver.rel_tol);
    cfg.solver.abs_tol = opt_number(oj, "abs_tol", cfg.solver.abs_tol);
    cfg.solver.initial_step = opt_number(oj, "initial_step", cfg.solver.initial_step);
    cfg.solver.max_steps = static_cast<long>(opt_number(oj, "max_steps", cfg.solver.max_steps));
  }
  try {
    cfg.solver.validate();
  } catch (const std::invalid_argument& e) {
    config_fail(std::string("solver: ") + e.what());
  }

  if (doc.contains("k0")) {
    if (!doc["k0"].is_array()) config_fail("field 'k0' must be an array of numbers");
    for (const auto& v : doc["k0"]) {
      if (!v.is_number()) config_fail("field 'k0' must contain numbers only");
      cfg.k0.push_back(v.get<double>());
    }
  }
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) config_fail("field 'output_dir' must be a string");
    cfg.output_dir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("notes")) {
    if (!doc["notes"].is_string()) config_fail("field 'notes' must be a string");
    cfg.notes = doc["notes"].get<std::string>();
  }
  return cfg;
}

json ScenarioConfig::to_json() const {
  json doc;
  doc["model"] = form == ModelForm::Dimensional ? "dimensional" : "dimensionless";
  json pj;
  if (form == ModelForm::Dimensional) {
    const DimensionalParams& p = *dim_params;
    pj = {{"mu_h", p.mu_h},   {"mu_v", p.mu_v}, {"mu_D", p.mu_D},     {"gamma", p.gamma},
          {"alpha", p.alpha}, {"eta", p.eta},   {"b", p.b},           {"beta_h", p.beta_h},
          {"beta_v", p.beta_v}, {"N_h", p.N_h}};
  } else {
    const DimensionlessParams& p = *nd_params;
    pj = {{"B_h", p.B_h}, {"B_v", p.B_v}, {"mu_h", p.mu_h}, {"gamma", p.gamma}, {"mu_D", p.mu_D}};
  }
  doc["params"] = pj;
  json st = {{"S_h", S_h0}, {"I_h", I_h0}};
  if (form == ModelForm::Dimensional) st["R_h"] = R_h0;
  st["S_v"] = S_v0;
  st["I_v"] = I_v0;
  st["D"] = D0;
  doc["initial_state"] = st;
  doc["horizon"] = horizon;
  doc["weights"] = {{"c", weights.c}, {"q", weights.q}, {"r", weights.r}, {"a", weights.a},
                    {"u_max", weights.u_max}};
  doc["sweep"] = {{"relaxation", sweep.relaxation},   {"u0", sweep.u0},
                  {"grid_size", sweep.grid_size},     {"tol_abs", sweep.tol_abs},
                  {"tol_rel", sweep.tol_rel},         {"max_iterations", sweep.max_iterations}};
  doc["solver"] = {{"rel_tol", solver.rel_tol},
                   {"abs_tol", solver.abs_tol},
                   {"initial_step", solver.initial_step},
                   {"max_steps", solver.max_steps}};
  doc["k0"] = k0;
  doc["output_dir"] = output_dir;
  if (!notes.empty()) doc["notes"] = notes;
  return doc;
}

DimensionlessParams ScenarioConfig::dimensionless_params() const {
  if (form == ModelForm::Dimensionless) return *nd_params;
  return nondimensionalize(*dim_params).params;
}

void apply_override(json& doc, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    config_fail("override must have the form key.path=value: '" + spec + "'");
  const std::string path = spec.substr(0, eq);
  const std::string raw = spec.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (...) {
    value = raw; // plain string
  }
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) config_fail("override has an empty path segment: '" + spec + "'");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (!node->is_object() && !node->is_null()) config_fail("override path '" + path + "' does not address an object");
    start = dot + 1;
  }
}

json run_simulate(const ScenarioConfig& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const int n = cfg.sweep.grid_size;
  std::vector<TimeseriesRow> rows;
  if (cfg.form == ModelForm::Dimensional) {
    const DimensionalParams p = *cfg.dim_params;
    State6 y0;
    y0 << cfg.S_h0, cfg.I_h0, cfg.R_h0, cfg.S_v0, cfg.I_v0, cfg.D0;
    const Trajectory traj = integrate(
        [&p](double, const Eigen::VectorXd& y) -> Eigen::VectorXd { return rhs_full(y, p); }, y0,
        0.0, cfg.horizon, cfg.solver);
    for (double t : uniform_grid(0.0, cfg.horizon, n)) {
      const State6 y = traj.value_at(t);
      rows.push_back({t, y[0], y[1], y[3], y[4], y[5], 0.0, y[2]});
    }
  } else {
    SweepSetup s = make_sweep_setup(cfg);
    const Trajectory traj = integrate(
        [&s](double, const Eigen::VectorXd& y) -> Eigen::VectorXd {
          return rhs_dimensionless(y, s.nd);
        },
        s.x0, 0.0, cfg.horizon, cfg.solver);
    rows = sample_run(s, traj, nullptr, n);
  }

  const DimensionlessParams nd = cfg.dimensionless_params();
  const PeakInfo pk = peak_of(rows);
  const double cum = cumulative_ih(rows);
  // Objective of the uncontrolled run in the run's units (u == 0 terms vanish).
  std::vector<double> ih;
  for (const auto& r : rows) ih.push_back(cfg.weights.r * r.I_h);
  const double j0 = simpson(ih, cfg.horizon / n) - cfg.weights.a * rows.back().S_h;

  json summary;
  summary["command"] = "simulate";
  summary["units"] = cfg.units_tag();
  summary["R0"] = analysis::basic_reproduction_number(nd);
  summary["level_sets"] = level_set_report(nd, cfg.k0);
  summary["equilibria"] = equilibria_brief(nd);
  summary["J_uncontrolled"] = j0;
  summary["peak_I_h"] = {{"uncontrolled", {{"value", pk.value}, {"time", pk.time}}}};
  summary["cumulative_I_h"] = {{"uncontrolled", cum}};
  summary["config"] = cfg.to_json();

  write_timeseries_csv(out_dir + "/timeseries.csv", rows);
  write_json_file(out_dir + "/summary.json", summary);
  return summary;
}

json run_analyze(const ScenarioConfig& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const DimensionlessParams nd = cfg.dimensionless_params();
  json report;
  report["command"] = "analyze";
  report["units"] = cfg.units_tag();
  report["R0"] = analysis::basic_reproduction_number(nd);
  report["dimensionless_params"] = {{"B_h", nd.B_h}, {"B_v", nd.B_v}, {"mu_h", nd.mu_h},
                                    {"gamma", nd.gamma}, {"mu_D", nd.mu_D}};
  json eq = json::array();
  for (const auto& rep : analysis::classify_equilibria(nd)) {
    json ev = json::array();
    for (int i = 0; i < 5; ++i)
      ev.push_back({{"re", rep.eigenvalues[i].real()}, {"im", rep.eigenvalues[i].imag()}});
    eq.push_back({{"label", rep.label},
                  {"state",
                   {{"S_h", rep.state[0]}, {"I_h", rep.state[1]}, {"S_v", rep.state[2]},
                    {"I_v", rep.state[3]}, {"D", rep.state[4]}}},
                  {"eigenvalues", ev},
                  {"classification", rep.classification}});
  }
  report["equilibria"] = eq;
  report["level_sets"] = level_set_report(nd, cfg.k0);
  report["config"] = cfg.to_json();
  write_json_file(out_dir + "/analysis.json", report);
  return report;
}

json run_optimize(const ScenarioConfig& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  OptimizeOutcome out = optimize_core(cfg);

  write_timeseries_csv(out_dir + "/timeseries.csv", out.controlled);
  write_timeseries_csv(out_dir + "/uncontrolled.csv", out.uncontrolled);

  // Costates are reported in the sweep's dimensionless convention; time is in
  // run units to line up with the state series.
  std::ostringstream adj;
  adj << "t,p1,p2,p3,p4,p5\n";
  for (double tau : uniform_grid(0.0, out.setup.w.T, out.setup.sweep.grid_size)) {
    const Eigen::VectorXd p = out.sweep.adjoint.value_at(tau);
    adj << fmt17(tau * out.setup.time_scale);
    for (int i = 0; i < 5; ++i) adj << ',' << fmt17(p[i]);
    adj << '\n';
  }
  write_text(out_dir + "/adjoint.csv", adj.str());
  write_json_file(out_dir + "/summary.json", out.summary);
  return out.summary;
}

json run_compare(const ScenarioConfig& a, const ScenarioConfig& b, const std::string& out_dir) {
  if (a.form != b.form) config_fail("compare: configs must share the model form");
  std::filesystem::create_directories(out_dir);
  OptimizeOutcome oa = optimize_core(a);
  OptimizeOutcome ob = optimize_core(b);

  auto entry = [](const json& s) {
    return json{{"horizon", s["config"]["horizon"]},
                {"J_uncontrolled", s["J_uncontrolled"]},
                {"J_optimal", s["J_optimal"]},
                {"converged", s["converged"]},
                {"peak_I_h", s["peak_I_h"]["controlled"]["value"]},
                {"cumulative_I_h", s["cumulative_I_h"]["controlled"]},
                {"control_effort", s["control_effort"]}};
  };
  json diff;
  for (const char* key : {"J_uncontrolled", "J_optimal", "peak_I_h", "cumulative_I_h",
                          "control_effort"}) {
    diff[key] = entry(ob.summary)[key].get<double>() - entry(oa.summary)[key].get<double>();
  }
  json report;
  report["command"] = "compare";
  report["units"] = a.units_tag();
  report["a"] = entry(oa.summary);
  report["b"] = entry(ob.summary);
  report["diff"] = diff;
  report["config_a"] = a.to_json();
  report["config_b"] = b.to_json();
  write_json_file(out_dir + "/compare.json", report);
  return report;
}

} // namespace epilv::scenario
