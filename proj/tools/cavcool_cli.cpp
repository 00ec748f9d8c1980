#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cavcool/app.hpp"
#include "cavcool/error.hpp"

int main(int argc, char** argv) {
  using namespace cavcool;

  CLI::App app{"Cavity-assisted sideband cooling of trapped molecules"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  std::string config_path, out_dir, method;
  bool svg = false;
  int workers = 0;
  long seed = 0;

  for (const char* name : {"simulate", "rates", "sweep", "omega-scan", "molecule", "convergence"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "run configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    sub->add_option("--method", method, "rate extraction method")
        ->check(CLI::IsMember({"numeric", "perturbative", "both"}));
    sub->add_flag("--svg", svg, "also write SVG heatmaps");
    sub->add_option("--workers", workers, "sweep worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed for randomized checks (the physics is deterministic)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    RunConfig config = load_config(config_path);
    if (to_string(config.mode) != sub)
      throw ConfigError("subcommand '" + sub + "' does not match config mode '" + std::string(to_string(config.mode)) +
                        "'");
    if (!out_dir.empty()) config.output.dir = out_dir;
    if (!method.empty()) config.method = parse_method(method);
    if (svg) config.output.svg = true;
    if (workers > 0) config.workers = workers;
    return run(config, std::cout);
  } catch (const std::exception& e) {
    return report_error(e, std::cerr);
  }
}
