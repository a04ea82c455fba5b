#include <CLI11.hpp>
#include <string>

#include "morphmc/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "morphmc: random-walk Metropolis with isotropic variable "
      "transformations for heavy-tailed targets"};
  app.require_subcommand(1);

  morphmc::cli::Options options;
  std::string sample_config, probe_config;

  auto* sample = app.add_subcommand(
      "sample", "run the configured chain and write draws plus a report");
  sample->add_option("config", sample_config, "run configuration (JSON)")
      ->required();
  sample->add_option("--chains", options.chains,
                     "number of independently seeded chains (suffixed files)")
      ->check(CLI::PositiveNumber);
  sample->add_flag("--emit-gamma", options.emit_gamma,
                   "also write the transformed-space draws");
  sample->add_flag("--quiet", options.quiet, "suppress progress output");

  auto* probe = app.add_subcommand(
      "probe", "tail/curvature report for the target (and induced) density");
  probe->add_option("config", probe_config, "run configuration (JSON)")
      ->required();
  probe->add_flag("--quiet", options.quiet, "suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : morphmc::cli::kExitConfigError;
  }

  if (sample->parsed()) return morphmc::cli::cmd_sample(sample_config, options);
  return morphmc::cli::cmd_probe(probe_config, options);
}
