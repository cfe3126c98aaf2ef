// Serial reference vs OpenMP kernels on the simulated Setting-1 workload.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "limitpost/comonotony.hpp"
#include "limitpost/config.hpp"
#include "limitpost/cost.hpp"

using namespace limitpost;

namespace {

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(a[i])));
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t M = 10000;
  if (argc > 1) {
    char* end = nullptr;
    M = std::strtoul(argv[1], &end, 10);
    if (*end != '\0' || M < 2) {
      std::fprintf(stderr, "usage: %s [M >= 2]\n", argv[0]);
      return 1;
    }
  }
  const ExperimentConfig cfg = preset("sim-setting-1");
  const CostModel p = cfg.problem();
  const auto grid = cfg.grid();
  const BrownianSource source(cfg.S0, cfg.sigma, cfg.T, cfg.m, cfg.seed);

  CostCurve serial, parallel;
  const double ts = seconds([&] { serial = mc_cost_curve(p, grid, source, M, Execution::serial); });
  const double tp = seconds([&] { parallel = mc_cost_curve(p, grid, source, M, Execution::parallel); });
  std::printf("cost curve  M=%zu grid=%zu threads=%d  serial %.3fs  parallel %.3fs  speedup %.2fx  max rel diff %.3g\n",
              M, grid.size(), max_threads(), ts, tp, ts / tp, max_rel_diff(serial.c, parallel.c));

  const std::size_t Mc = 10 * M;
  CovarianceEstimate cs, cp;
  const auto F = functionals::running_max(), G = functionals::time_mean();
  const double tcs = seconds([&] { cs = estimate_covariance(F, G, source, Mc, Execution::serial); });
  const double tcp = seconds([&] { cp = estimate_covariance(F, G, source, Mc, Execution::parallel); });
  std::printf("covariance  M=%zu  serial %.3fs  parallel %.3fs  speedup %.2fx  identical %s\n", Mc, tcs, tcp,
              tcs / tcp, (cs.cov == cp.cov && cs.se == cp.se) ? "yes" : "no");
  return 0;
}
