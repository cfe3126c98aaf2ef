#pragma once

#include <ostream>
#include <string>

#include "limitpost/config.hpp"

namespace limitpost {

enum class ExitCode : int {
  ok = 0,
  usage = 1,
  config_parse = 2,
  data_load = 3,
  numeric_fault = 4,
  criteria_violation = 5,
};

struct RunOptions {
  bool dry_run = false;
  bool strict_criteria = false;
  std::ostream* log = nullptr;  // progress and errors; nullptr silences
};

inline constexpr const char* kVersion = "1.0.0";

// Runs config.mode and writes artifacts under config.out_dir.
ExitCode run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace limitpost
