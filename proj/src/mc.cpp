#include "limitpost/mc.hpp"

#include <cmath>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace limitpost {

void RunningStats::add(double x) noexcept {
  n += 1.0;
  const double d = x - mean;
  mean += d / n;
  m2 += d * (x - mean);
}

void RunningStats::merge(const RunningStats& o) noexcept {
  if (o.n == 0.0) return;
  if (n == 0.0) {
    *this = o;
    return;
  }
  const double total = n + o.n;
  const double d = o.mean - mean;
  mean += d * (o.n / total);
  m2 += o.m2 + d * d * (n * o.n / total);
  n = total;
}

double RunningStats::std_error() const noexcept { return n > 1.0 ? std::sqrt(variance() / n) : 0.0; }

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

namespace {

template <class Body>
void parallel_blocks(std::size_t blocks, Body&& body) {
  std::exception_ptr failure;
  std::mutex guard;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    try {
      body(static_cast<std::size_t>(b));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<RunningStats> mc_accumulate(std::size_t replications, std::size_t width, const ReplicationKernel& kernel,
                                        Execution exec) {
  std::vector<RunningStats> total(width);
  if (exec == Execution::serial) {
    std::vector<double> row(width);
    for (std::size_t i = 0; i < replications; ++i) {
      kernel(i, row);
      for (std::size_t j = 0; j < width; ++j) total[j].add(row[j]);
    }
    return total;
  }
  const std::size_t blocks = (replications + kReductionBlock - 1) / kReductionBlock;
  std::vector<RunningStats> partial(blocks * width);
  parallel_blocks(blocks, [&](std::size_t b) {
    std::vector<double> row(width);
    RunningStats* acc = partial.data() + b * width;
    const std::size_t end = std::min(replications, (b + 1) * kReductionBlock);
    for (std::size_t i = b * kReductionBlock; i < end; ++i) {
      kernel(i, row);
      for (std::size_t j = 0; j < width; ++j) acc[j].add(row[j]);
    }
  });
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t j = 0; j < width; ++j) total[j].merge(partial[b * width + j]);
  }
  return total;
}

std::vector<double> mc_tabulate(std::size_t replications, std::size_t width, const ReplicationKernel& kernel,
                                Execution exec) {
  std::vector<double> table(replications * width);
  auto fill = [&](std::size_t i) { kernel(i, std::span<double>(table.data() + i * width, width)); };
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < replications; ++i) fill(i);
    return table;
  }
  const std::size_t blocks = (replications + kReductionBlock - 1) / kReductionBlock;
  parallel_blocks(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(replications, (b + 1) * kReductionBlock);
    for (std::size_t i = b * kReductionBlock; i < end; ++i) fill(i);
  });
  return table;
}

}  // namespace limitpost
