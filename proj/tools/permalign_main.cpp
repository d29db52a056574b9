// Command-line front end: one subcommand per experiment, each driven by a
// JSON config and writing its results (plus a config echo) into --out.

#include <CLI11.hpp>

#include "permalign/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Neuron-permutation alignment toolkit"};
  app.require_subcommand(1);

  std::string command;
  permalign::RunOptions opts;
  std::uint64_t seed = 0;

  for (const std::string& name : permalign::known_commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config_path, "JSON experiment config")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    CLI::Option* seed_opt = sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--threads", opts.threads,
                    "worker threads (default: LMC_THREADS or hardware)");
    sub->callback([&command, &opts, &seed, name, seed_opt] {
      command = name;
      if (seed_opt->count() > 0) opts.seed_override = seed;
    });
  }

  CLI11_PARSE(app, argc, argv);
  return permalign::run_command(command, opts);
}
