#include "limitpost/data_io.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "limitpost/csv.hpp"
#include "limitpost/errors.hpp"
#include "limitpost/price_paths.hpp"
#include "limitpost/rng.hpp"

namespace limitpost {

void TickSeries::validate() const {
  if (timestamps.size() != bids.size()) throw ValidationError("ticks: column length mismatch");
  for (std::size_t i = 0; i < bids.size(); ++i) {
    if (!(bids[i] > 0.0) || !std::isfinite(bids[i])) {
      throw ValidationError("ticks: bid must be positive and finite (row " + std::to_string(i + 1) + ")");
    }
    if (!std::isfinite(timestamps[i])) throw ValidationError("ticks: non-finite timestamp (row " + std::to_string(i + 1) + ")");
    if (i > 0 && timestamps[i] < timestamps[i - 1]) {
      throw ValidationError("ticks: timestamps not sorted (row " + std::to_string(i + 1) + ")");
    }
  }
}

TickSeries parse_ticks(std::istream& in) {
  const auto table = csv::read_numeric(in, {"timestamp", "bid"});
  TickSeries s;
  s.timestamps.reserve(table.rows.size());
  s.bids.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const double bid = table.rows[i][1];
    if (!(bid > 0.0) || !std::isfinite(bid)) {
      throw ValidationError("ticks: bid must be positive and finite (line " + std::to_string(table.lines[i]) + ")");
    }
    s.timestamps.push_back(table.rows[i][0]);
    s.bids.push_back(bid);
  }
  s.validate();
  return s;
}

TickSeries load_ticks(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open tick file " + file.string());
  return parse_ticks(in);
}

void write_ticks_csv(std::ostream& out, const TickSeries& series) {
  csv::write_header(out, {"timestamp", "bid"});
  for (std::size_t i = 0; i < series.size(); ++i) csv::write_row(out, {series.timestamps[i], series.bids[i]});
}

std::vector<PricePath> make_cycles(const TickSeries& series, int cycle_length, int shift) {
  series.validate();
  auto cycles = replay_source(series.timestamps, series.bids, cycle_length, shift);
  for (const auto& c : cycles) {
    if (!(c.horizon() > 0.0)) throw ValidationError("ticks: a cycle has zero elapsed time");
  }
  return cycles;
}

double cycle_lambda(const IntensityModel& model, const PricePath& cycle, double delta) {
  if (cycle.size() < 2 || cycle.times.size() != cycle.size()) throw DomainError("cycle_lambda: need >= 2 ticks");
  double sum = 0.0;
  const double ref = cycle.values[0];
  for (std::size_t i = 1; i < cycle.size(); ++i) {
    sum += std::exp(-model.k * (cycle.values[i] - ref + delta)) * (cycle.times[i] - cycle.times[i - 1]);
  }
  return model.A * sum;
}

std::vector<double> mean_cycle_lambda(const IntensityModel& model, const std::vector<PricePath>& cycles,
                                      const std::vector<double>& deltas) {
  if (cycles.empty()) throw DomainError("mean_cycle_lambda: no cycles");
  std::vector<double> out;
  out.reserve(deltas.size());
  for (double d : deltas) {
    double s = 0.0;
    for (const auto& c : cycles) s += cycle_lambda(model, c, d);
    out.push_back(s / static_cast<double>(cycles.size()));
  }
  return out;
}

void write_cycles_csv(std::ostream& out, const std::vector<PricePath>& cycles) {
  out << "cycle_id,t,bid\n";
  for (std::size_t n = 0; n < cycles.size(); ++n) {
    for (std::size_t i = 0; i < cycles[n].size(); ++i) {
      out << n << ',' << csv::format(cycles[n].times[i]) << ',' << csv::format(cycles[n].values[i]) << '\n';
    }
  }
}

TickSeries synthesize_ticks(const TickSynthesis& spec) {
  if (spec.n_ticks < 2 || !(spec.s0 > 0.0) || !(spec.sigma >= 0.0) || !(spec.mean_spacing > 0.0)) {
    throw DomainError("synthesize_ticks: invalid parameters");
  }
  const RngStream prices{spec.seed, 0x71c5};
  const RngStream clock{spec.seed, 0x71c6};
  TickSeries s;
  s.timestamps.resize(spec.n_ticks);
  s.bids.resize(spec.n_ticks);
  s.timestamps[0] = 0.0;
  s.bids[0] = spec.s0;
  for (std::size_t i = 1; i < spec.n_ticks; ++i) {
    const double dt = -spec.mean_spacing * std::log(clock.uniform(i));
    s.timestamps[i] = s.timestamps[i - 1] + dt;
    s.bids[i] = s.bids[i - 1] + spec.sigma * std::sqrt(dt) * prices.normal(i);
    if (!(s.bids[i] > 0.0)) s.bids[i] = s.bids[i - 1];
  }
  return s;
}

}  // namespace limitpost
