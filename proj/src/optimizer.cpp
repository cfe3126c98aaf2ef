#include "limitpost/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "limitpost/csv.hpp"
#include "limitpost/errors.hpp"

namespace limitpost {

double StepSchedule::gamma(std::size_t n) const {
  if (n == 0) throw DomainError("step schedule: index starts at 1");
  return gamma1 / std::pow(static_cast<double>(n), rho);
}

void StepSchedule::validate() const {
  if (!(gamma1 > 0.0) || !std::isfinite(gamma1)) throw DomainError("step schedule: gamma1 must be positive");
  if (!(rho > 0.5 && rho <= 1.0)) throw DomainError("step schedule: rho must lie in (1/2, 1]");
}

Projection project_step(double delta, double gamma, double H, double delta_max) {
  const double raw = delta - gamma * H;
  const double next = std::clamp(raw, 0.0, delta_max);
  const bool active = next != raw;
  const double residual = (gamma > 0.0 && active) ? (next - delta) / gamma + H : 0.0;
  return {next, residual, active};
}

SaStepResult sa_step(double delta, std::size_t n, const StepSchedule& schedule, const CostModel& p,
                     const PricePath& path, std::size_t path_id) {
  if (!(delta >= 0.0 && delta <= p.setup.delta_max)) throw DomainError("sa_step: iterate outside [0, delta_max]");
  const double H = h_func(p, delta, path);
  if (!std::isfinite(H)) {
    throw NumericFault("sa_step: non-finite H on path " + std::to_string(path_id) + " at delta " + csv::format(delta) +
                       " (Q=" + std::to_string(p.setup.Q) + ", kappa=" + csv::format(p.setup.kappa) +
                       ", A=" + csv::format(p.model.A) + ", k=" + csv::format(p.model.k) + ")");
  }
  const double g = schedule.gamma(n + 1);
  const Projection pr = project_step(delta, g, H, p.setup.delta_max);
  SaStepRecord rec;
  rec.H = H;
  rec.gamma = g;
  rec.projection_active = pr.active;
  rec.proj_residual = pr.residual;
  rec.martingale_increment = std::numeric_limits<double>::quiet_NaN();
  return {pr.next, rec};
}

namespace {

double interpolate(const CostCurve& c, double d) {
  const auto& x = c.deltas;
  if (d <= x.front()) return c.cp.front();
  if (d >= x.back()) return c.cp.back();
  const auto it = std::upper_bound(x.begin(), x.end(), d);
  const std::size_t j = static_cast<std::size_t>(it - x.begin());
  const double w = (d - x[j - 1]) / (x[j] - x[j - 1]);
  return (1.0 - w) * c.cp[j - 1] + w * c.cp[j];
}

}  // namespace

SaTrajectory run_sa(const SaConfig& config, const PathSource& source, const CostCurve* mean_field) {
  config.problem.setup.validate();
  config.schedule.validate();
  const double dmax = config.problem.setup.delta_max;
  if (!(config.delta0 > 0.0 && config.delta0 < dmax)) throw DomainError("run_sa: delta0 must lie in (0, delta_max)");
  require_paths(source, config.n_steps);
  SaTrajectory t;
  t.averaging = config.averaging;
  t.iterates.reserve(config.n_steps + 1);
  t.records.reserve(config.n_steps);
  double delta = config.delta0;
  t.iterates.push_back(delta);
  for (std::size_t n = 0; n < config.n_steps; ++n) {
    auto step = sa_step(delta, n, config.schedule, config.problem, source.path(n), n);
    if (mean_field) step.record.martingale_increment = step.record.H - interpolate(*mean_field, delta);
    delta = step.next;
    if (!(delta >= 0.0 && delta <= dmax)) throw NumericFault("run_sa: iterate left [0, delta_max]");
    t.iterates.push_back(delta);
    t.records.push_back(step.record);
  }
  t.averaged = polyak_average(t.iterates);
  return t;
}

std::vector<double> polyak_average(std::span<const double> iterates) {
  if (iterates.empty()) throw DomainError("polyak_average: empty sequence");
  std::vector<double> out(iterates.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < iterates.size(); ++i) {
    sum += iterates[i];
    out[i] = sum / static_cast<double>(i + 1);
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const SaTrajectory& t) {
  csv::write_header(out, {"n", "delta", "delta_avg", "H", "gamma", "proj_residual"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t n = 0; n < t.iterates.size(); ++n) {
    if (n == 0) {
      csv::write_row(out, {0.0, t.iterates[0], t.averaged[0], nan, nan, nan});
    } else {
      const auto& r = t.records[n - 1];
      csv::write_row(out, {static_cast<double>(n), t.iterates[n], t.averaged[n], r.H, r.gamma, r.proj_residual});
    }
  }
}

std::vector<MeanReversionPoint> mean_reversion_probe(const CostModel& p, std::span<const double> grid, double delta_ref,
                                                     const PathSource& source, std::size_t M, Execution exec) {
  if (!(delta_ref > 0.0 && delta_ref < p.setup.delta_max)) throw DomainError("mean_reversion_probe: delta_ref must be interior");
  const CostCurve c = mc_cost_curve(p, grid, source, M, exec);
  std::vector<MeanReversionPoint> out;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double lever = grid[j] - delta_ref;
    MeanReversionPoint pt{grid[j], c.cp[j] * lever, c.cp_se[j] * std::abs(lever), false};
    pt.flagged = pt.value + 3.0 * pt.se < 0.0;
    out.push_back(pt);
  }
  return out;
}

AveragingRateReport averaging_rate_check(const std::vector<PricePath>& paths, const StepSchedule& schedule,
                                         std::span<const std::size_t> checkpoints, std::size_t sampled_corners,
                                         std::uint64_t seed) {
  if (paths.empty()) throw DomainError("averaging_rate_check: no paths");
  std::vector<std::vector<double>> all;
  double L = 0.0;
  for (const auto& p : paths) {
    all.push_back(p.values);
    for (double v : p.values) L = std::max(L, v);
  }
  AveragingRateReport rep;
  DiscrepancyOptions opts{sampled_corners, seed};
  for (std::size_t n : checkpoints) {
    if (n == 0 || n > all.size()) throw DomainError("averaging_rate_check: checkpoint outside the sample");
    const std::vector<std::vector<double>> prefix(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
    const Discrepancy d = star_discrepancy(prefix, L, &all, opts);
    rep.exact = rep.exact && d.exact;
    rep.points.push_back({n, d.value, static_cast<double>(n) * d.value * schedule.gamma(n)});
  }
  if (rep.points.size() >= 2) rep.decreasing = rep.points.back().term < rep.points.front().term;
  return rep;
}

}  // namespace limitpost
