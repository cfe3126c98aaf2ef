#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace limitpost {

// Welford accumulator; merge() is Chan's pairwise update.
struct RunningStats {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept;
  void merge(const RunningStats& other) noexcept;
  double variance() const noexcept { return n > 1.0 ? m2 / (n - 1.0) : 0.0; }
  double std_error() const noexcept;
};

enum class Execution { serial, parallel };

// Paths are grouped in fixed blocks of this many; block results are merged in
// index order, so parallel output does not depend on the thread count.
inline constexpr std::size_t kReductionBlock = 64;

// kernel(i, out) writes `width` statistics for replication i.
using ReplicationKernel = std::function<void(std::size_t, std::span<double>)>;

// Serial: one Welford pass in index order. Parallel: OpenMP over blocks.
std::vector<RunningStats> mc_accumulate(std::size_t replications, std::size_t width, const ReplicationKernel& kernel,
                                        Execution exec);

// Evaluate kernel(i, out) for every i into a replications x width row-major table.
std::vector<double> mc_tabulate(std::size_t replications, std::size_t width, const ReplicationKernel& kernel,
                                Execution exec);

// Number of OpenMP threads used by parallel regions (1 without OpenMP).
int max_threads();
void set_threads(int n);

}  // namespace limitpost
