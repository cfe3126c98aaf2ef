// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "limitpost/comonotony.hpp"
#include "limitpost/config.hpp"
#include "limitpost/cost.hpp"
#include "limitpost/criteria.hpp"
#include "limitpost/data_io.hpp"
#include "limitpost/experiment.hpp"
#include "limitpost/optimizer.hpp"
#include "limitpost/poisson_kernel.hpp"
#include "oracles.hpp"
#include "settings.hpp"

using namespace limitpost;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char b[64];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

constexpr std::uint64_t kSaOffset = 1ull << 40;

// 1. Poisson identities.
Outcome poisson_suite() {
  Timer timer;
  int failures = 0, checks = 0;
  auto expect = [&](bool ok) {
    ++checks;
    failures += !ok;
  };
  const PenaltySpec phi = PenaltySpec::exponential_impact(1.0, 0.01);
  const double h = 1e-5;
  for (double mu : {0.1, 1.0, 5.0, 10.0}) {
    const auto p = oracle::pmf_table(mu, 200);
    for (int q = 1; q <= 20; ++q) {
      long double emin = 0, esh = 0;
      for (int j = 0; j <= 200; ++j) {
        emin += std::min(q, j) * p[j];
        esh += std::max(q - j, 0) * p[j];
      }
      expect(std::abs(poisson::expected_min(mu, q) - static_cast<double>(emin)) <= 1e-12);
      expect(std::abs(poisson::expected_shortfall(mu, q) - static_cast<double>(esh)) <= 1e-12);
      // d/dmu P(N <= q) = -P(N = q); d/dmu E[q ^ N] = P(N <= q-1).
      const double dcdf = (poisson::cdf(mu + h, q) - poisson::cdf(mu - h, q)) / (2 * h);
      expect(std::abs(dcdf + poisson::pmf(mu, q)) <= 1e-6);
      const double dmin = (poisson::expected_min(mu + h, q) - poisson::expected_min(mu - h, q)) / (2 * h);
      expect(std::abs(dmin - poisson::cdf(mu, q - 1)) <= 1e-6);
      // k P(N = k) = mu P(N = k-1).
      expect(std::abs(q * poisson::pmf(mu, q) - mu * poisson::pmf(mu, q - 1)) <= 1e-14 * mu * poisson::pmf(mu, q - 1));
    }
  }
  // mu P(N <= q) non-decreasing while q >= 2 floor(mu) + 1.
  for (int q : {3, 10, 21}) {
    const double hi = std::floor((q - 1) / 2.0) + 0.999;
    double prev = -1;
    for (int i = 0; i < 100; ++i) {
      const double mu = hi * i / 99.0, v = mu * poisson::cdf(mu, q);
      expect(v >= prev);
      prev = v;
    }
  }
  // Conditional increment bounded by its value at mu = 0.
  for (int q : {2, 5, 10, 40})
    for (double mu : {0.1, 1.0, 2.0, 8.0, 30.0}) expect(poisson::theta(mu, q, phi) <= poisson::theta(0.0, q, phi) + 1e-14);
  // Hazard ratio non-decreasing for mu <= q-1.
  for (int q : {2, 5, 10, 30}) {
    double prev = -1;
    for (int i = 0; i <= 200; ++i) {
      const double v = poisson::hazard_ratio((q - 1) * i / 200.0, q);
      expect(v >= prev - 1e-15);
      prev = v;
    }
  }
  // Conditional increment non-increasing where the increment-ratio condition holds.
  for (int q : {5, 10, 20}) {
    const double mu_max = 0.5;
    const auto verdict = rho_condition(phi, q, mu_max);
    expect(verdict.holds);
    double prev = poisson::theta(0.0, q, phi);
    for (int i = 1; i <= 100; ++i) {
      const double v = poisson::theta(mu_max * i / 100.0, q, phi);
      expect(v <= prev + 1e-14);
      prev = v;
    }
  }
  const double t = timer.seconds();
  expect(t <= 1.0);
  return {failures == 0, std::to_string(checks - failures) + "/" + std::to_string(checks) + " checks, " +
                             fmt("%.3f s", t)};
}

// 2. Finite differences against the representation integrands.
Outcome gradient_representation() {
  Timer timer;
  const auto p = settings::setting1();
  const BrownianSource src(100.0, 0.01, 5.0, 20, 2024);
  const double h = 1e-3;
  const auto grid = uniform_grid(0.025, 0.975, 20);
  const auto fd = mc_finite_difference_check(p, grid, h, src, 10000);
  const std::size_t a1 = fd.first_order_agreements(3.0), a2 = fd.second_order_agreements(3.0);
  const double t = timer.seconds();
  return {a1 >= 18 && a2 >= 18 && t <= 60.0, "C' " + std::to_string(a1) + "/20, C'' " + std::to_string(a2) +
                                                  "/20 within 3 combined SE, " + fmt("%.2f s", t)};
}

// 3. Dedicated identity-penalty formulas against the general ones.
Outcome branch_coherence() {
  const auto p = settings::setting2();
  const BrownianSource src(100.0, 0.05, 5.0, 20, 99);
  double worst = 0.0;
  for (std::size_t i = 0; i < 1000; ++i) {
    const auto path = src.path(i);
    for (double d : {0.0, 0.01, 0.05, 0.2, 0.5, 1.0}) {
      const auto L = big_lambda(p.model, d, path);
      const double x0 = path.initial(), xT = path.terminal();
      const double hg = h_general(p, d, L, x0, xT), hi = h_identity(p, d, L, x0, xT);
      const double sg = c_second_general(p, d, L, x0, xT), si = c_second_identity(p, d, L, x0, xT);
      worst = std::max(worst, std::abs(hg - hi) / std::max(1.0, std::abs(hi)));
      worst = std::max(worst, std::abs(sg - si) / std::max(1.0, std::abs(si)));
    }
  }
  return {worst <= 1e-12, "max scaled discrepancy " + fmt("%.2e", worst) + " over 1000 paths"};
}

// 4. Simulated SA against the grid-scan argmin, 20 seeds per setting.
Outcome sa_simulated() {
  std::string detail;
  bool pass = true;
  for (int s = 1; s <= 2; ++s) {
    const auto p = s == 1 ? settings::setting1() : settings::setting2();
    const auto grid = uniform_grid(0.0, 1.0, 200);
    const double tol = std::max(0.05, 2.0 * (grid[1] - grid[0]));
    int hits = 0;
    double worst_time = 0.0, worst_gap = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      Timer timer;
      const BrownianSource curve_src(100.0, 0.01, 5.0, 20, seed, 0);
      const BrownianSource sa_src(100.0, 0.01, 5.0, 20, seed, kSaOffset);
      const auto target = grid_argmin(mc_cost_curve(p, grid, curve_src, 10000)).delta;
      const auto t = run_sa(SaConfig{p, StepSchedule{0.01, 1.0}, 100, 0.5, true}, sa_src);
      const double gap = std::abs(t.estimate() - target);
      hits += gap <= tol;
      worst_gap = std::max(worst_gap, gap);
      worst_time = std::max(worst_time, timer.seconds());
    }
    pass = pass && hits >= 18 && worst_time <= 5.0;
    detail += (s == 1 ? "" : "; ") + std::string("setting ") + std::to_string(s) + ": " + std::to_string(hits) +
              "/20 within " + fmt("%.3f", tol) + " (worst gap " + fmt("%.4f", worst_gap) + ", slowest run " +
              fmt("%.2f s)", worst_time);
  }
  return {pass, detail};
}

// 5. Replay SA on a synthetic tick file.
Outcome sa_replay() {
  const auto series = synthesize_ticks(TickSynthesis{});
  const auto cycles = make_cycles(series, 15, 15);
  std::string detail = std::to_string(series.size()) + " ticks -> " + std::to_string(cycles.size()) + " cycles";
  bool pass = cycles.size() == 220;
  const ReplaySource src(cycles);
  for (const char* name : {"market-setting-1", "market-setting-2"}) {
    const auto cfg = preset(name);
    const auto p = cfg.problem();
    const auto grid = cfg.grid();
    const double tol = std::max(0.05, 2.0 * (grid[1] - grid[0]));
    const auto target = grid_argmin(mc_cost_curve(p, grid, src, cycles.size())).delta;
    const auto t = run_sa(SaConfig{p, cfg.schedule(), cycles.size(), cfg.start(), true}, src);
    const double gap = std::abs(t.estimate() - target);
    pass = pass && gap <= tol;
    detail += std::string("; ") + name + ": averaged " + fmt("%.5f", t.estimate()) + " vs grid " +
              fmt("%.5f", target) + " (gap " + fmt("%.5f", gap) + ")";
  }
  return {pass, detail};
}

// 6. Deterministic paths: SA limit against the closed-form argmin.
Outcome zero_noise() {
  std::string detail;
  bool pass = true;
  for (int s = 1; s <= 2; ++s) {
    const auto p = s == 1 ? settings::setting1() : settings::setting2();
    oracle::Penalty phi;
    if (!p.penalty.is_identity()) phi = {p.penalty.a_prime(), p.penalty.k_prime()};
    const oracle::ConstantPathProblem o{5.0L, 1.0L, 5.0L, 100.0L, p.setup.kappa, 10, phi};
    const double target = static_cast<double>(o.argmin(0.0L, 1.0L));
    const BrownianSource flat(100.0, 0.0, 5.0, 20, 1);
    const auto t = run_sa(SaConfig{p, StepSchedule{0.01, 1.0}, 20000, 0.5, false}, flat);
    const double gap = std::abs(t.iterates.back() - target);
    pass = pass && gap <= 1e-4;
    detail += (s == 1 ? "" : "; ") + std::string("setting ") + std::to_string(s) + ": limit " +
              fmt("%.6f", t.iterates.back()) + " vs " + fmt("%.6f", target) + " (gap " + fmt("%.1e)", gap);
  }
  return {pass, detail};
}

// 7. Closed-form criteria and the sharp-bound sign test.
Outcome criteria_values() {
  const IntensityModel unit{5.0, 1.0};
  const auto id = PenaltySpec::identity();
  const auto ex = PenaltySpec::exponential_impact(1.0, 0.01);
  const ExecutionSetup s1{10, 5.0, 6.0, 1.0, 100.0};
  const ExecutionSetup wide{10, 5.0, 6.0, 5.0, 100.0};
  struct Case {
    double got, exact, printed;
    int digits;
  };
  // Exact hand-derived expressions, and the values as printed (rounded).
  const Case cases[] = {
      {kappa_bound_origin(s1, unit, id, 100.0), 101.0 / 100.0, 1.01, 2},
      {kappa_bound_origin(s1, unit, ex, 100.0), 101.0 / (100.0 * (10 + 10 * std::exp(0.1) - 9 - 9 * std::exp(0.09))),
       0.4582, 4},
      {kappa_bound_global(wide, unit, id, 101.0), 96.0 / 101.0, 0.9505, 4},
      {kappa_bound_convexity(s1, unit, id, 100.0).kappa_ceiling, 2.0 / 100.0, 0.02, 2},
  };
  bool pass = true;
  std::string detail = "bounds";
  for (const auto& c : cases) {
    const double scale = std::pow(10.0, c.digits);
    const bool ok = std::abs(c.got - c.exact) <= 1e-6 && std::round(c.got * scale) / scale == c.printed;
    pass = pass && ok;
    detail += " " + fmt("%.6f", c.got);
  }
  const auto st = structural_check(s1, unit);
  const bool st_ok = !st.ok && std::abs(st.log_threshold - (std::log(50.0) + 100.0)) < 1e-12;
  pass = pass && st_ok;
  detail += std::string("; structural ") + (st.ok ? "PASS" : "FAIL") + " at ln threshold " +
            fmt("%.4f", st.log_threshold);

  auto p = settings::setting1();
  p.setup.kappa = 0.2;
  const BrownianSource src(100.0, 0.01, 5.0, 20, 77);
  const std::vector<double> zero{0.0};
  const auto sharp = sharp_bounds_mc(p, src, 10000, zero);
  const auto curve = mc_cost_curve(p, zero, src, 10000);
  const bool premise = p.setup.kappa < sharp.b2 - 3 * sharp.b2_se;
  const bool sign_ok = premise && curve.cp[0] < -3 * curve.cp_se[0];
  pass = pass && sign_ok;
  detail += "; b2 " + fmt("%.4f", sharp.b2) + " +- " + fmt("%.4f", sharp.b2_se) + " with C'(0) " +
            fmt("%.4f", curve.cp[0]) + " +- " + fmt("%.4f", curve.cp_se[0]);
  return {pass, detail};
}

// 8. Covariance signs for the shipped admissible diffusions.
Outcome comonotony() {
  const std::size_t M = 100000;
  const IntensityModel unit{5.0, 1.0};
  struct Model {
    const char* name;
    DiffusionSpec spec;
  };
  const Model models[] = {
      {"bachelier", diffusions::bachelier(0.5, 2.0)},
      {"black_scholes", diffusions::black_scholes(0.05, 0.2)},
      {"hull_white", diffusions::hull_white(0.03, [](double t) { return 0.2 + 0.1 * t; }, [](double) { return 0.1; })},
      {"local_vol", diffusions::bounded_local_vol(0.02, 0.1, 0.3, 100.0)},
  };
  const std::vector<MonotoneFunctional> fs{functionals::terminal(), functionals::running_max(),
                                           functionals::running_min(), functionals::time_mean(),
                                           functionals::lambda_at_zero(unit, 100.0)};
  int pairs = 0, consistent = 0;
  bool audits = true;
  for (const auto& m : models) {
    const EulerSource src(m.spec, 100.0, 1.0, 20, 5);
    for (const auto& f : fs) audits = audits && audit_monotony(f, src, 100, 3);
    const auto table = mc_tabulate(
        M, fs.size(),
        [&](std::size_t i, std::span<double> out) {
          const auto path = src.path(i);
          for (std::size_t j = 0; j < fs.size(); ++j) out[j] = fs[j].eval(path);
        },
        Execution::parallel);
    for (std::size_t a = 0; a < fs.size(); ++a)
      for (std::size_t b = a; b < fs.size(); ++b) {
        std::vector<double> x(M), y(M);
        for (std::size_t i = 0; i < M; ++i) {
          x[i] = table[i * fs.size() + a];
          y[i] = table[i * fs.size() + b];
        }
        auto c = covariance_with_jackknife(x, y);
        c.same_monotony = fs[a].monotony == fs[b].monotony;
        ++pairs;
        consistent += c.consistent(3.0);
      }
  }
  const BrownianSource bm(100.0, 0.01, 5.0, 20, 8);
  const auto anti = estimate_covariance(functionals::terminal(), functionals::negated(functionals::terminal()), bm, M);
  const bool anti_ok = anti.cov <= -3 * anti.se;

  double beta_spread = 0.0;
  const auto bs = diffusions::black_scholes(0.05, 0.2);
  const double beta0 = 0.05 / 0.2 - 0.1;
  for (double y = -3.0; y <= 3.0; y += 0.25) beta_spread = std::max(beta_spread, std::abs(lamperti_beta(bs, 100.0, y) - beta0));
  const std::vector<double> tg{0.0, 0.5, 1.0};
  std::vector<double> xg;
  for (int i = 0; i <= 40; ++i) xg.push_back(10.0 + 10.0 * i);
  const auto cev = admissibility_report(diffusions::cev(0.05, 0.3, 0.5), tg, xg, 100.0);

  const bool pass = audits && consistent == pairs && anti_ok && beta_spread <= 1e-12 && !cev.condition_iii;
  return {pass, std::to_string(consistent) + "/" + std::to_string(pairs) + " pairs sign-consistent at M=1e5; anti control " +
                    fmt("%.3e", anti.cov) + " +- " + fmt("%.1e", anti.se) + "; BS beta spread " +
                    fmt("%.1e", beta_spread) + "; CEV condition (iii) " + (cev.condition_iii ? "holds" : "fails") +
                    (audits ? "" : "; monotony audit failed")};
}

// 9. H non-decreasing in delta on every sampled path under the global hypotheses.
Outcome pathwise_lyapunov() {
  const CostModel p{ExecutionSetup{60, 5.0, 0.5, 1.0, 100.0}, IntensityModel{5.0, 1.0}, PenaltySpec::identity()};
  const BrownianSource src(100.0, 0.01, 5.0, 20, 4242);
  std::vector<PricePath> paths;
  double s_star = 0.0, mu_hi = 0.0;
  for (std::size_t i = 0; i < 1000; ++i) {
    paths.push_back(src.path(i));
    for (double v : paths.back().values) s_star = std::max(s_star, v);
    mu_hi = std::max(mu_hi, big_lambda(p.model, 0.0, paths.back()).value);
  }
  const double bound = kappa_bound_global(p.setup, p.model, p.penalty, s_star);
  const bool hypotheses = p.setup.kappa < bound && p.setup.Q >= 2.0 * mu_hi;
  const auto r = check_pathwise_H_monotone(p, uniform_grid(0.0, 1.0, 50), paths);
  return {hypotheses && r.pass_rate == 1.0, fmt("pass rate %.4f", r.pass_rate) + " on 1000 paths; kappa 0.5 vs bound " +
                                                fmt("%.4f", bound) + ", Q 60 vs max 2 mu " + fmt("%.3f", 2 * mu_hi)};
}

// 10. Byte-identical CSV output across thread counts.
Outcome reproducibility() {
  const fs::path root = fs::temp_directory_path() / "limitpost_acceptance_repro";
  fs::remove_all(root);
  fs::create_directories(root);
  {
    std::ofstream out(root / "ticks.csv", std::ios::binary);
    write_ticks_csv(out, synthesize_ticks(TickSynthesis{}));
  }
  auto bodies = [](const fs::path& dir) {
    std::map<std::string, std::string> m;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.path().extension() != ".csv") continue;
      std::ifstream in(e.path(), std::ios::binary);
      std::ostringstream s;
      s << in.rdbuf();
      m[e.path().filename().string()] = s.str();
    }
    return m;
  };
  bool pass = true;
  std::size_t files = 0;
  const int saved = max_threads();
  for (const auto& name : preset_names()) {
    std::map<std::string, std::string> reference;
    for (int threads : {1, 4, 8}) {
      auto cfg = preset(name);
      if (cfg.source_kind == "replay") cfg.file = (root / "ticks.csv").string();
      cfg.threads = threads;
      cfg.out_dir = (root / (name + "_" + std::to_string(threads))).string();
      if (run_experiment(cfg) != ExitCode::ok) {
        pass = false;
        continue;
      }
      const auto b = bodies(cfg.out_dir);
      if (threads == 1) {
        reference = b;
        files += b.size();
      } else {
        pass = pass && b == reference && !b.empty();
      }
    }
  }
  set_threads(saved);
  fs::remove_all(root);
  return {pass, std::to_string(preset_names().size()) + " presets, " + std::to_string(files) +
                    " CSV files compared at 1, 4 and 8 threads"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"poisson identity suite", poisson_suite},
      {"gradient representation", gradient_representation},
      {"branch coherence", branch_coherence},
      {"SA convergence, simulated", sa_simulated},
      {"SA convergence, replay", sa_replay},
      {"zero-noise oracle", zero_noise},
      {"criteria module", criteria_values},
      {"co-monotony harness", comonotony},
      {"pathwise Lyapunov", pathwise_lyapunov},
      {"reproducibility", reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
