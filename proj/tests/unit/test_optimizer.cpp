#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "limitpost/config.hpp"
#include "limitpost/data_io.hpp"
#include "limitpost/errors.hpp"
#include "limitpost/optimizer.hpp"
#include "limitpost/poisson_kernel.hpp"
#include "oracles.hpp"
#include "settings.hpp"

using namespace limitpost;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double sample_variance(std::span<const double> x) {
  RunningStats s;
  for (double v : x) s.add(v);
  return s.variance();
}

}  // namespace

TEST_CASE("step schedule", "[optimizer]") {
  const StepSchedule s{0.01, 1.0};
  CHECK_NOTHROW(s.validate());
  CHECK(s.gamma(1) == 0.01);
  CHECK_THAT(s.gamma(4), WithinRel(0.0025, 1e-15));
  for (std::size_t n = 1; n < 500; ++n) CHECK(s.gamma(n + 1) < s.gamma(n));
  CHECK_THAT((StepSchedule{1.0, 0.75}.gamma(16)), WithinRel(0.125, 1e-15));
  CHECK_THROWS_AS((StepSchedule{0.01, 0.5}.validate()), DomainError);
  CHECK_THROWS_AS((StepSchedule{0.01, 0.3}.validate()), DomainError);
  CHECK_THROWS_AS((StepSchedule{0.01, 1.2}.validate()), DomainError);
  CHECK_THROWS_AS((StepSchedule{0.0, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS(s.gamma(0), DomainError);
}

TEST_CASE("projection", "[optimizer]") {
  const auto null = project_step(0.4, 0.0, 123.0, 1.0);
  CHECK(null.next == 0.4);
  CHECK_FALSE(null.active);
  CHECK(null.residual == 0.0);

  const double g = 0.1, H = 0.5;  // g H = 0.05
  const auto low = project_step(0.01, g, H, 1.0);
  CHECK(low.next == 0.0);
  CHECK(low.active);
  CHECK_THAT(low.residual, WithinAbs((g * H - 0.01) / g, 1e-15));

  const auto inside = project_step(0.5, g, H, 1.0);
  CHECK_THAT(inside.next, WithinAbs(0.45, 1e-15));
  CHECK_FALSE(inside.active);
  CHECK(inside.residual == 0.0);

  const auto high = project_step(0.99, g, -1.0, 1.0);
  CHECK(high.next == 1.0);
  CHECK_THAT(high.residual, WithinAbs((1.0 - 0.99) / g - 1.0, 1e-12));
}

TEST_CASE("one SA step composes H and the clamp", "[optimizer]") {
  const auto p = settings::setting1();
  const auto path = simulate_brownian(100.0, 0.01, 5.0, 20, RngStream{42, 0});
  const StepSchedule s{0.01, 1.0};
  double lam = 0.0;
  for (int i = 0; i < 20; ++i) lam += 0.25 * 5.0 * std::exp(-(path.values[i] - path.values[0] + 1.0));
  const double H = -10.0 * poisson::sf(lam, 10) + (-lam * (path.initial() - 1.0) - lam) * poisson::cdf(lam, 9) +
                   6.0 * path.terminal() * lam * poisson::phi_mu(lam, 10, p.penalty);
  const double expected = std::clamp(1.0 - 0.01 * H, 0.0, 1.0);
  const auto r = sa_step(1.0, 0, s, p, path);
  CHECK_THAT(r.next, WithinAbs(expected, 1e-12));
  CHECK_THAT(r.record.H, WithinRel(H, 1e-12));
  CHECK(r.record.gamma == 0.01);
  CHECK(sa_step(1.0, 3, s, p, path).record.gamma == 0.0025);
  CHECK_THROWS_AS(sa_step(1.5, 0, s, p, path), DomainError);
}

TEST_CASE("non-finite H is reported with context", "[optimizer]") {
  auto p = settings::setting1();
  auto path = PricePath::constant(100.0, 5.0, 20);
  path.values[20] = std::numeric_limits<double>::infinity();
  try {
    sa_step(0.5, 0, StepSchedule{}, p, path, 17);
    FAIL("expected a numeric fault");
  } catch (const NumericFault& e) {
    const std::string what = e.what();
    CHECK(what.find("path 17") != std::string::npos);
    CHECK(what.find("kappa=6") != std::string::npos);
  }
}

TEST_CASE("polyak averaging", "[optimizer]") {
  const std::vector<double> x{1, 2, 3};
  CHECK(polyak_average(x) == std::vector<double>{1.0, 1.5, 2.0});
  const std::vector<double> c(7, 0.3);
  for (double v : polyak_average(c)) CHECK_THAT(v, WithinAbs(0.3, 1e-16));
  CHECK_THROWS_AS(polyak_average(std::vector<double>{}), DomainError);
}

TEST_CASE("run_sa keeps iterates in the box and is deterministic", "[optimizer][property]") {
  auto p = settings::setting1();
  p.setup.kappa = 60.0;  // strong pull toward 0 exercises the lower bound
  const BrownianSource src(100.0, 0.01, 5.0, 20, 3);
  const SaConfig cfg{p, StepSchedule{0.5, 0.75}, 200, 0.5, true};
  const auto a = run_sa(cfg, src);
  const auto b = run_sa(cfg, src);
  CHECK(a.iterates == b.iterates);
  REQUIRE(a.iterates.size() == 201);
  REQUIRE(a.records.size() == 200);
  bool hit_boundary = false;
  for (std::size_t n = 0; n < a.records.size(); ++n) {
    CHECK(a.iterates[n + 1] >= 0.0);
    CHECK(a.iterates[n + 1] <= 1.0);
    hit_boundary |= a.records[n].projection_active;
    if (!a.records[n].projection_active) CHECK(a.records[n].proj_residual == 0.0);
  }
  CHECK(hit_boundary);
  const auto avg = polyak_average(a.iterates);
  CHECK(a.averaged == avg);
  CHECK(a.estimate() == avg.back());
}

TEST_CASE("run_sa input checks", "[optimizer]") {
  const auto p = settings::setting1();
  const BrownianSource src(100.0, 0.01, 5.0, 20, 3);
  CHECK_THROWS_AS(run_sa(SaConfig{p, StepSchedule{}, 10, 0.0, true}, src), DomainError);
  CHECK_THROWS_AS(run_sa(SaConfig{p, StepSchedule{}, 10, 1.0, true}, src), DomainError);
  CHECK_THROWS_AS(run_sa(SaConfig{p, StepSchedule{0.01, 0.5}, 10, 0.5, true}, src), DomainError);
  const ReplaySource few({PricePath::constant(100.0, 5.0, 20)});
  CHECK_THROWS_AS(run_sa(SaConfig{p, StepSchedule{}, 10, 0.5, true}, few), SourceExhausted);
}

TEST_CASE("trajectory CSV", "[optimizer]") {
  const auto p = settings::setting1();
  const BrownianSource src(100.0, 0.01, 5.0, 20, 3);
  const auto t = run_sa(SaConfig{p, StepSchedule{}, 3, 0.5, true}, src);
  std::ostringstream out;
  write_trajectory_csv(out, t);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,delta,delta_avg,H,gamma,proj_residual");
  std::getline(in, line);
  CHECK(line == "0,0.5,0.5,nan,nan,nan");
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
}

TEST_CASE("martingale increments are recorded against a mean field", "[optimizer]") {
  const auto p = settings::setting1();
  const BrownianSource src(100.0, 0.01, 5.0, 20, 3);
  const auto grid = uniform_grid(0.0, 1.0, 51);
  const auto field = mc_cost_curve(p, grid, src, 500);
  const auto t = run_sa(SaConfig{p, StepSchedule{}, 50, 0.5, true}, src, &field);
  RunningStats inc;
  for (const auto& r : t.records) {
    CHECK(std::isfinite(r.martingale_increment));
    inc.add(r.martingale_increment);
  }
  CHECK(std::abs(inc.mean) < 4 * inc.std_error() + 1.0);
  const auto plain = run_sa(SaConfig{p, StepSchedule{}, 5, 0.5, true}, src);
  CHECK(std::isnan(plain.records[0].martingale_increment));
}

TEST_CASE("zero-noise SA converges to the closed-form argmin", "[optimizer]") {
  const auto p = settings::setting1();
  const BrownianSource flat(100.0, 0.0, 5.0, 20, 1);
  const auto t = run_sa(SaConfig{p, StepSchedule{0.01, 1.0}, 20000, 0.5, false}, flat);
  const oracle::ConstantPathProblem o{5.0L, 1.0L, 5.0L, 100.0L, 6.0L, 10, oracle::Penalty{1.0L, 0.01L}};
  const double target = static_cast<double>(o.argmin(0.0L, 1.0L));
  CHECK_THAT(target, WithinAbs(0.032119524003616739529, 1e-8));
  CHECK_THAT(t.iterates.back(), WithinAbs(target, 1e-4));
  // After the first step that lands on the far side, iterates approach monotonically.
  std::size_t first = 0;
  while (first + 1 < t.iterates.size() && t.iterates[first] > target) ++first;
  for (std::size_t n = first + 1; n < t.iterates.size(); ++n)
    CHECK(std::abs(t.iterates[n] - target) <= std::abs(t.iterates[n - 1] - target) + 1e-15);
}

TEST_CASE("mean reversion on the constant path", "[optimizer]") {
  const auto p = settings::setting1();
  const BrownianSource flat(100.0, 0.0, 5.0, 20, 1);
  const double ref = 0.032119524003616739529;
  const auto grid = uniform_grid(0.0, 1.0, 41);
  const auto probe = mean_reversion_probe(p, grid, ref, flat, 10);
  for (const auto& pt : probe) {
    CHECK_FALSE(pt.flagged);
    CHECK(pt.value > 0.0);
  }
  CHECK_THROWS_AS(mean_reversion_probe(p, grid, 0.0, flat, 10), DomainError);
}

TEST_CASE("mean reversion on setting 1 away from the argmin", "[optimizer]") {
  const auto p = settings::setting1();
  const BrownianSource src(100.0, 0.01, 5.0, 20, 21);
  const auto grid = uniform_grid(0.0, 1.0, 101);
  const auto curve = mc_cost_curve(p, grid, src, 2000);
  const auto best = grid_argmin(curve);
  const auto probe = mean_reversion_probe(p, grid, best.delta, src, 2000);
  for (std::size_t j = 0; j < probe.size(); ++j) {
    if (j + 2 >= best.index && j <= best.index + 2) continue;
    CHECK(probe[j].value > 3 * probe[j].se);
  }
}

TEST_CASE("averaging smooths the market replay trajectory", "[optimizer]") {
  // Roughness is the mean squared second difference; the averaged sequence of a
  // run is compared with the raw iterates of the same run.
  const auto roughness = [](const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 2; i < x.size(); ++i) {
      const double d = x[i] - 2.0 * x[i - 1] + x[i - 2];
      s += d * d;
    }
    return s / static_cast<double>(x.size() - 2);
  };
  const auto cfg = preset("market-setting-1");
  const auto p = cfg.problem();
  int smoother = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    TickSynthesis spec;
    spec.seed = seed;
    const ReplaySource src(make_cycles(synthesize_ticks(spec), 15, 15));
    const auto run = run_sa(SaConfig{p, StepSchedule{1.0 / 550, 0.95}, 220, cfg.start(), true}, src);
    smoother += roughness(run.averaged) < roughness(run.iterates);
  }
  CHECK(smoother == 20);
}

TEST_CASE("averaging-rate diagnostic", "[optimizer]") {
  const auto cycles = make_cycles(synthesize_ticks(TickSynthesis{}), 15, 15);
  std::vector<PricePath> pairs;
  for (const auto& c : cycles) pairs.push_back(PricePath{{0.0, 1.0}, {c.values[0], c.values[14]}, Quadrature::right});
  const std::vector<std::size_t> checkpoints{10, 50, 220};
  const auto rep = averaging_rate_check(pairs, StepSchedule{1.0 / 550, 0.95}, checkpoints);
  CHECK(rep.exact);
  REQUIRE(rep.points.size() == 3);
  CHECK(rep.points.back().discrepancy == 0.0);
  for (const auto& pt : rep.points) CHECK(pt.term >= 0.0);
  const auto wide = averaging_rate_check(cycles, StepSchedule{1.0 / 550, 0.95}, checkpoints, 500, 1);
  CHECK_FALSE(wide.exact);
  const std::vector<std::size_t> bad{221};
  CHECK_THROWS_AS(averaging_rate_check(pairs, StepSchedule{}, bad), DomainError);
}
