#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "limitpost/config.hpp"
#include "limitpost/errors.hpp"
#include "limitpost/experiment.hpp"

using limitpost::ExitCode;

int main(int argc, char** argv) {
  CLI::App app{"Optimal limit-order posting distance: cost curves, stochastic approximation, criteria"};
  app.require_subcommand(1);

  std::string config_file, preset_name, out_dir, ticks;
  std::uint64_t seed = 0;
  int threads = 0;
  bool dry_run = false, strict = false;
  std::vector<std::string> overrides;

  const std::vector<std::pair<std::string, std::string>> modes = {
      {"cost-curve", "Monte-Carlo cost curve with gradient and curvature"},
      {"run-sa", "cost curve plus projected stochastic approximation on simulated paths"},
      {"calibrate", "fit the exponential intensity to (distance, rate) points"},
      {"check-criteria", "closed-form and Monte-Carlo admissibility bounds"},
      {"comonotony-test", "covariance signs of monotone path functionals"},
      {"replay-sa", "stochastic approximation on tick-data cycles"},
      {"synth-ticks", "write a synthetic Brownian tick file"},
  };
  for (const auto& [name, help] : modes) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_file, "flat section.key = value config file");
    sub->add_option("--preset", preset_name, "named parameter set")
        ->check(CLI::IsMember(limitpost::preset_names()));
    sub->add_option("--seed", seed, "base seed (u64)");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "OpenMP threads (0 keeps default)")->check(CLI::NonNegativeNumber);
    sub->add_option("--ticks", ticks, "tick CSV (timestamp,bid) for replay sources");
    sub->add_option("--set", overrides, "override: section.key=value (repeatable)");
    sub->add_flag("--dry-run", dry_run, "validate and print the resolved config, write nothing");
    sub->add_flag("--strict-criteria", strict, "exit 5 when a conservative criterion fails");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // CLI11 returns its own codes; --help maps to 0, everything else is a usage error.
    return app.exit(e) == 0 ? 0 : static_cast<int>(ExitCode::usage);
  }
  const std::string mode = app.get_subcommands().front()->get_name();
  auto* sub = app.get_subcommands().front();

  limitpost::ExperimentConfig cfg;
  try {
    if (!preset_name.empty()) cfg = limitpost::preset(preset_name);
    if (!config_file.empty()) cfg = limitpost::load_config(config_file);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw limitpost::ParseError("--set expects section.key=value, got '" + o + "'");
      cfg.set(o.substr(0, eq), o.substr(eq + 1));
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::config_parse);
  }
  cfg.mode = mode;
  if (sub->count("--seed")) cfg.seed = seed;
  if (sub->count("--out")) cfg.out_dir = out_dir;
  if (sub->count("--threads")) cfg.threads = threads;
  if (sub->count("--ticks")) {
    cfg.file = ticks;
    cfg.source_kind = "replay";
  }

  limitpost::RunOptions opt;
  opt.dry_run = dry_run;
  opt.strict_criteria = strict;
  opt.log = dry_run ? &std::cout : &std::cerr;
  try {
    return static_cast<int>(limitpost::run_experiment(cfg, opt));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::usage);
  }
}
