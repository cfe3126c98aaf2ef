#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "limitpost/cost.hpp"
#include "limitpost/optimizer.hpp"

namespace limitpost {

// Flat `section.key = value` configuration of one experiment.
struct ExperimentConfig {
  std::string mode = "cost-curve";

  double A = 5.0;
  double k = 1.0;

  std::string penalty_kind = "exponential_impact";  // or "identity"
  double a_prime = 1.0;
  double k_prime = 0.01;

  int Q = 10;
  double T = 5.0;
  double kappa = 6.0;
  double delta_max = 1.0;
  double S0 = 100.0;

  std::string source_kind = "brownian";  // brownian | euler | replay
  double sigma = 0.01;
  int m = 20;
  std::string diffusion = "black_scholes";  // euler: bachelier | black_scholes | local_vol | cev
  double drift = 0.0;                       // mu (bachelier) or r
  double vol = 0.2;                         // sigma (bachelier) or vartheta
  double alpha = 0.5;                       // cev exponent
  std::string file;                         // replay tick file
  int cycle_length = 15;
  int shift = 15;

  double gamma1 = 0.01;
  double rho = 1.0;
  bool averaging = true;
  double delta0 = 0.0;  // 0 selects delta_max / 2

  std::size_t M = 10000;
  std::size_t n_steps = 100;
  std::uint64_t seed = 42;
  int threads = 0;  // 0 keeps the OpenMP default

  double grid_lo = 0.0;
  double grid_hi = 0.0;  // 0 selects delta_max
  std::size_t grid_points = 200;

  std::string out_dir = "out";
  std::string calibration_file;
  double expected_ST = 0.0;  // 0: analytic for Brownian, else Monte-Carlo
  double s_star = 0.0;       // 0: maximum over the sampled paths
  std::size_t sharp_M = 1000;

  CostModel problem() const;
  PenaltySpec penalty() const;
  StepSchedule schedule() const;
  std::vector<double> grid() const;
  double start() const { return delta0 > 0.0 ? delta0 : 0.5 * delta_max; }

  // Throws ValidationError (or DomainError from the owning types).
  void validate() const;
  std::string to_text() const;
  // Applies one `section.key = value`; throws ParseError on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);  // throws ParseError for unknown names

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace limitpost
