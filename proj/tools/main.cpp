#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "epilv/scenario.hpp"

namespace {

using epilv::scenario::json;

struct CommonOpts {
  std::vector<std::string> configs;
  std::string out_dir;
  std::vector<double> k0;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOpts& opts, int n_configs) {
  cmd->add_option("--config", opts.configs, "scenario config file (JSON)")
      ->required()
      ->expected(n_configs);
  cmd->add_option("--out", opts.out_dir, "output directory (overrides the config)");
  cmd->add_option("--k0", opts.k0, "level-set constant, repeatable")->allow_extra_args(false);
  cmd->add_option("--override", opts.overrides,
                  "config override as dot.path=value, repeatable; "
                  "applied to every config the command loads");
}

epilv::scenario::ScenarioConfig load(const std::string& path, const CommonOpts& opts) {
  std::ifstream f(path);
  if (!f) throw epilv::scenario::ConfigError("config: cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(f);
  } catch (const std::exception& e) {
    throw epilv::scenario::ConfigError("config: invalid JSON in '" + path + "': " + e.what());
  }
  if (doc.is_object() && doc.contains("config") && doc["config"].is_object()) doc = doc["config"];
  for (const std::string& ov : opts.overrides) epilv::scenario::apply_override(doc, ov);
  auto cfg = epilv::scenario::ScenarioConfig::from_json(doc);
  if (!opts.k0.empty()) cfg.k0 = opts.k0;
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  return cfg;
}

void print_summary(const json& summary) {
  std::cout << summary.dump(2) << "\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"host-vector epidemic model with predator-based control"};
  app.require_subcommand(1);

  CommonOpts sim_o, ana_o, opt_o, cmp_o;
  CLI::App* sim = app.add_subcommand("simulate", "integrate the uncontrolled model");
  CLI::App* ana = app.add_subcommand("analyze", "equilibria, thresholds and level sets");
  CLI::App* opt = app.add_subcommand("optimize", "forward-backward sweep for the release policy");
  CLI::App* cmp = app.add_subcommand("compare", "optimize two scenarios side by side");
  add_common(sim, sim_o, 1);
  add_common(ana, ana_o, 1);
  add_common(opt, opt_o, 1);
  add_common(cmp, cmp_o, 2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    json summary;
    if (*sim) {
      auto cfg = load(sim_o.configs[0], sim_o);
      summary = epilv::scenario::run_simulate(cfg, cfg.output_dir);
    } else if (*ana) {
      auto cfg = load(ana_o.configs[0], ana_o);
      summary = epilv::scenario::run_analyze(cfg, cfg.output_dir);
    } else if (*opt) {
      auto cfg = load(opt_o.configs[0], opt_o);
      summary = epilv::scenario::run_optimize(cfg, cfg.output_dir);
    } else {
      auto a = load(cmp_o.configs[0], cmp_o);
      auto b = load(cmp_o.configs[1], cmp_o);
      const std::string out = cmp_o.out_dir.empty() ? a.output_dir : cmp_o.out_dir;
      summary = epilv::scenario::run_compare(a, b, out);
    }
    print_summary(summary);
    return 0;
  } catch (const epilv::scenario::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const epilv::IntegrationError& e) {
    std::cerr << "error: integration failed: " << e.what() << "\n";
    return 3;
  } catch (const epilv::control::SweepError& e) {
    std::cerr << "error: sweep failed: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
