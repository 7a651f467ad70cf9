// Command line scenario runner. Exit status: 0 all checks passed, 1 some
// check failed, 2 configuration or usage error.
#include <CLI11.hpp>
#include <iostream>

#include "holo2/cli.hpp"

using namespace holo2;

int main(int argc, char** argv) {
  CLI::App app{"2-holonomy scenario runner"};
  app.require_subcommand(0, 1);

  ScenarioConfig cfg;
  std::string format = "plain";
  std::string config_path;

  app.add_option("--steps", cfg.steps, "integrator steps per unit parameter");
  app.add_option("--seed", cfg.seed, "seed for all sampled checks");
  app.add_option("--tolerance", cfg.tolerance_scale, "scale applied to every tolerance");
  app.add_option("--format", format, "report format: plain or records")
      ->check(CLI::IsMember({"plain", "records"}));
  app.add_option("--samples", cfg.samples, "sample count for verifier suites");
  app.add_option("--mesh-n", cfg.mesh_n, "base mesh columns");
  app.add_option("--mesh-m", cfg.mesh_m, "base mesh rows");
  app.add_option("--config", config_path, "key = value configuration file");

  std::map<std::string, CLI::App*> subs;
  for (const std::string& name : scenario_names()) {
    subs[name] = app.add_subcommand(name, "run the " + name + " scenario");
    subs[name]->fallthrough();
  }
  subs["sphere-gerbe"]->add_option("--flux", cfg.flux, "flux quanta n");
  CLI::App* sweep = app.add_subcommand("sweep", "alias of refinement-sweep");
  sweep->fallthrough();
  CLI::App* list = app.add_subcommand("list", "list scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      std::cout << list_scenarios();
      return 0;
    }
    if (!config_path.empty()) {
      ScenarioConfig file_cfg = load_config(config_path);
      // flags given on the command line override the file
      file_cfg.scenario = cfg.scenario;
      if (app.count("--steps")) file_cfg.steps = cfg.steps;
      if (app.count("--seed")) file_cfg.seed = cfg.seed;
      if (app.count("--tolerance")) file_cfg.tolerance_scale = cfg.tolerance_scale;
      if (app.count("--samples")) file_cfg.samples = cfg.samples;
      if (app.count("--mesh-n")) file_cfg.mesh_n = cfg.mesh_n;
      if (app.count("--mesh-m")) file_cfg.mesh_m = cfg.mesh_m;
      std::swap(cfg, file_cfg);
    }
    if (app.count("--format") || config_path.empty())
      cfg.format = format == "records" ? ReportFormat::records : ReportFormat::plain;

    bool picked = false;
    for (const std::string& name : scenario_names())
      if (subs[name]->parsed()) {
        cfg.scenario = name;
        picked = true;
      }
    if (sweep->parsed()) {
      cfg.scenario = "refinement-sweep";
      picked = true;
    }
    if (!picked && config_path.empty()) {
      std::cerr << app.help() << "\n";
      return 2;
    }

    RunReport rep = run_scenario(cfg);
    std::cout << emit_report(rep, cfg.format);
    return rep.all_pass() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
