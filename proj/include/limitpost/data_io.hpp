#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

#include "limitpost/market_model.hpp"
#include "limitpost/price_path.hpp"

namespace limitpost {

struct TickSeries {
  std::vector<double> timestamps;  // seconds, non-decreasing
  std::vector<double> bids;        // positive, finite

  std::size_t size() const noexcept { return bids.size(); }
  void validate() const;  // throws ValidationError
};

TickSeries parse_ticks(std::istream& in);
TickSeries load_ticks(const std::filesystem::path& file);
void write_ticks_csv(std::ostream& out, const TickSeries& series);

// Cycles of `cycle_length` ticks with right-endpoint weights t_i - t_{i-1}.
std::vector<PricePath> make_cycles(const TickSeries& series, int cycle_length, int shift);

// A sum_{i>=2} e^{-k (S_i - S_1 + delta)} (t_i - t_{i-1}).
double cycle_lambda(const IntensityModel& model, const PricePath& cycle, double delta);

// Empirical mean of cycle_lambda over cycles, one value per delta.
std::vector<double> mean_cycle_lambda(const IntensityModel& model, const std::vector<PricePath>& cycles,
                                      const std::vector<double>& deltas);

void write_cycles_csv(std::ostream& out, const std::vector<PricePath>& cycles);

struct TickSynthesis {
  double s0 = 10.0;
  double sigma = 0.002;        // per sqrt(second)
  double mean_spacing = 9.0;   // seconds, exponential inter-arrival
  std::size_t n_ticks = 3300;
  std::uint64_t seed = 1;
};

// Brownian bid series on Poisson tick times; deterministic in the seed.
TickSeries synthesize_ticks(const TickSynthesis& spec);

}  // namespace limitpost
