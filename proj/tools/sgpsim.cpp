#include <iostream>

#include "CLI11.hpp"
#include "sgpnet/errors.hpp"
#include "sgpnet/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Joint routing and computation offloading simulator"};
  std::string config_path, output_dir;
  bool deterministic = false, quiet = false, list_presets = false;
  app.add_option("config", config_path, "JSON experiment config");
  app.add_option("-o,--output-dir", output_dir, "Override output_dir from the config");
  app.add_flag("--deterministic", deterministic, "Omit timestamps and wall-clock columns from outputs");
  app.add_flag("-q,--quiet", quiet, "No per-run progress on stderr");
  app.add_flag("--list-presets", list_presets, "Print the built-in scenario presets and exit");
  CLI11_PARSE(app, argc, argv);

  if (list_presets) {
    for (const auto& p : sgpnet::table2_presets())
      std::cout << p.name << ": " << p.nodes << " nodes, " << p.edges << " edges, " << p.tasks << " tasks, "
                << p.sources << " sources per task\n";
    return 0;
  }
  if (config_path.empty()) {
    std::cerr << "a config file is required (see --help)\n";
    return 3;
  }
  sgpnet::ExperimentConfig cfg;
  try {
    cfg = sgpnet::load_config(config_path);
  } catch (const sgpnet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 3;
  }
  if (!output_dir.empty()) cfg.output_dir = output_dir;
  if (deterministic) cfg.deterministic = true;
  const auto res = sgpnet::run_experiment(cfg, quiet ? nullptr : &std::cerr);
  std::size_t converged = 0;
  for (const auto& r : res.rows) converged += r.converged;
  std::cout << res.rows.size() << " runs, " << converged << " converged, outputs in " << cfg.output_dir << '\n';
  return res.exit_code;
}
