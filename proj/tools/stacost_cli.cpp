#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "stacost/experiment.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string out = "stacost-out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "preset name or path to a JSON config")
      ->required()
      ->envname("STACOST_CONFIG");
  cmd->add_option("--seed", o.seed, "random seed")->envname("STACOST_SEED");
  cmd->add_option("--threads", o.threads, "worker threads")->envname("STACOST_THREADS");
}

stacost::ExperimentConfig resolve(const Overrides& o) {
  stacost::ExperimentConfig cfg;
  bool is_preset = false;
  for (const auto& name : stacost::preset_names()) is_preset = is_preset || name == o.config;
  cfg = is_preset ? stacost::preset(o.config) : stacost::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  return cfg;
}

int print_report(const stacost::ValidationReport& rep) {
  for (const auto& e : rep.errors) std::cout << "error: " << e << '\n';
  for (const auto& w : rep.warnings) std::cout << "invalid: " << w << '\n';
  if (rep.ok()) std::cout << "ok\n";
  return rep.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energetic cost of shortcuts to adiabaticity: batch experiment runner"};
  app.require_subcommand(1);

  Overrides run_opts, validate_opts;
  auto* run = app.add_subcommand("run", "run a preset or config and write CSV/JSON output");
  add_common(run, run_opts);
  run->add_option("--out", run_opts.out, "output directory")->envname("STACOST_OUT");

  auto* val = app.add_subcommand("validate", "check a config without running it");
  add_common(val, validate_opts);

  auto* list = app.add_subcommand("list-presets", "show the named presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& name : stacost::preset_names())
        std::cout << name << "  " << stacost::preset_description(name) << '\n';
      return 0;
    }
    if (*val) return print_report(stacost::validate(resolve(validate_opts)));

    const stacost::ExperimentConfig cfg = resolve(run_opts);
    const auto rep = stacost::run_experiment(cfg, run_opts.out);
    for (const auto& f : rep.files) std::cout << "wrote " << f.string() << '\n';
    for (const auto& f : rep.failures) std::cerr << "cell " << f.cell << " failed: " << f.message << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
