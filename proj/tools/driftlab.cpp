// Command-line front end: one subcommand per experiment family.
#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "driftlab/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = driftlab::cli;
  CLI::App app{"Drifting-field identities, counterexamples and stability diagnostics"};
  app.require_subcommand(1);

  const std::map<std::string, std::string> about{
      {"identities", "finite-difference and spectral checks of the companion identities"},
      {"satellite", "escaping-satellite counterexample sweep"},
      {"tilt", "slowly tilted power-law counterexample sweep"},
      {"field", "drift field of two measures on a grid"},
      {"anchor", "overlap and anchor diagnostics along a measure sequence"},
      {"simulate", "particles pushed along the drift field"},
  };

  cli::CommonOptions options;
  std::uint64_t seed = 0;
  for (const std::string& name : cli::command_names()) {
    CLI::App* sub = app.add_subcommand(name, about.count(name) ? about.at(name) : "");
    sub->add_option("--config", options.config_path, "YAML config file, or - for stdin")->required();
    sub->add_option("--out", options.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--threads", options.threads, "worker threads")->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--seed") > 0) options.seed = seed;
  return cli::run_command(chosen->get_name(), options, std::cerr);
}
