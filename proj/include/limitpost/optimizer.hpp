#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "limitpost/cost.hpp"
#include "limitpost/price_paths.hpp"

namespace limitpost {

// gamma_n = gamma1 / n^rho with rho in (1/2, 1].
struct StepSchedule {
  double gamma1 = 0.01;
  double rho = 1.0;

  double gamma(std::size_t n) const;  // n >= 1
  void validate() const;              // throws DomainError
};

struct SaStepRecord {
  double H = 0.0;
  double gamma = 0.0;
  bool projection_active = false;
  double proj_residual = 0.0;         // (Proj(d - g H) - d) / g + H
  double martingale_increment = 0.0;  // H - mean-field estimate, NaN when unavailable
};

struct Projection {
  double next;
  double residual;
  bool active;
};

// Proj_[0, delta_max](delta - gamma H) and its residual.
Projection project_step(double delta, double gamma, double H, double delta_max);

struct SaStepResult {
  double next;
  SaStepRecord record;
};

// One update using gamma_{n+1}; throws NumericFault on a non-finite H.
SaStepResult sa_step(double delta, std::size_t n, const StepSchedule& schedule, const CostModel& p,
                     const PricePath& path, std::size_t path_id = 0);

struct SaConfig {
  CostModel problem;
  StepSchedule schedule;
  std::size_t n_steps = 100;
  double delta0 = 0.0;
  bool averaging = true;
};

struct SaTrajectory {
  std::vector<double> iterates;  // delta_0 .. delta_N
  std::vector<double> averaged;  // running means of iterates
  std::vector<SaStepRecord> records;  // record n produced iterates[n + 1]
  bool averaging = true;

  double estimate() const { return averaging ? averaged.back() : iterates.back(); }
};

// Step n consumes source.path(n). mean_field (optional) supplies C'(delta) for
// the martingale-increment diagnostic by linear interpolation.
SaTrajectory run_sa(const SaConfig& config, const PathSource& source, const CostCurve* mean_field = nullptr);

std::vector<double> polyak_average(std::span<const double> iterates);

void write_trajectory_csv(std::ostream& out, const SaTrajectory& t);

struct MeanReversionPoint {
  double delta;
  double value;  // C'(delta) (delta - delta_ref)
  double se;
  bool flagged;  // value < -3 se
};

std::vector<MeanReversionPoint> mean_reversion_probe(const CostModel& p, std::span<const double> grid, double delta_ref,
                                                     const PathSource& source, std::size_t M,
                                                     Execution exec = Execution::parallel);

// n D*_n gamma_n on prefixes of the observed data, against the empirical
// law of the full sample. For d > 2 the discrepancy is a sampled lower bound.
struct AveragingRatePoint {
  std::size_t n;
  double discrepancy;
  double term;
};

struct AveragingRateReport {
  std::vector<AveragingRatePoint> points;
  bool exact = true;
  bool decreasing = false;  // last term below the first
};

AveragingRateReport averaging_rate_check(const std::vector<PricePath>& paths, const StepSchedule& schedule,
                                         std::span<const std::size_t> checkpoints, std::size_t sampled_corners = 2000,
                                         std::uint64_t seed = 0);

}  // namespace limitpost
