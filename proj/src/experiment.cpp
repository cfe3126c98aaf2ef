#include "limitpost/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

#include "limitpost/comonotony.hpp"
#include "limitpost/criteria.hpp"
#include "limitpost/csv.hpp"
#include "limitpost/data_io.hpp"
#include "limitpost/errors.hpp"
#include "limitpost/market_model.hpp"

namespace limitpost {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kSaStreamOffset = 1ull << 40;

class DataLoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Context {
  const ExperimentConfig& cfg;
  const RunOptions& opt;
  CostModel problem;
  std::vector<std::string> artifacts;

  void log(const std::string& line) const {
    if (opt.log) *opt.log << line << '\n';
  }

  std::ofstream open(const std::string& name) {
    const fs::path p = fs::path(cfg.out_dir) / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    artifacts.push_back(name);
    return out;
  }
};

DiffusionSpec diffusion_of(const ExperimentConfig& c) {
  if (c.diffusion == "bachelier") return diffusions::bachelier(c.drift, c.vol);
  if (c.diffusion == "black_scholes") return diffusions::black_scholes(c.drift, c.vol);
  if (c.diffusion == "local_vol") return diffusions::bounded_local_vol(c.drift, c.vol, c.vol, c.S0);
  return diffusions::cev(c.drift, c.vol, c.alpha);
}

std::vector<PricePath> load_cycles(const ExperimentConfig& c) {
  try {
    const TickSeries ticks = load_ticks(c.file);
    return make_cycles(ticks, c.cycle_length, c.shift);
  } catch (const ParseError& e) {
    throw DataLoadError(e.what());
  } catch (const ValidationError& e) {
    throw DataLoadError(e.what());
  } catch (const DomainError& e) {
    throw DataLoadError(e.what());
  }
}

std::unique_ptr<PathSource> make_source(const ExperimentConfig& c, std::uint64_t offset,
                                        const std::vector<PricePath>* cycles) {
  if (c.source_kind == "brownian") return std::make_unique<BrownianSource>(c.S0, c.sigma, c.T, c.m, c.seed, offset);
  if (c.source_kind == "euler") {
    return std::make_unique<EulerSource>(diffusion_of(c), c.S0, c.T, c.m, c.seed, offset);
  }
  return std::make_unique<ReplaySource>(*cycles);
}

void write_summary_line(std::ostream& out, const std::string& key, double v) {
  out << key << " = " << csv::format(v) << '\n';
}

CostCurve curve_step(Context& ctx, const PathSource& source, std::size_t M) {
  const auto grid = ctx.cfg.grid();
  CostCurve curve = mc_cost_curve(ctx.problem, grid, source, M);
  auto out = ctx.open("curve.csv");
  write_cost_curve_csv(out, curve);
  return curve;
}

void sa_step_artifacts(Context& ctx, const PathSource& sa_source, const CostCurve& curve, std::ostream& summary,
                       const std::string& suffix, const StepSchedule& schedule) {
  SaConfig sc{ctx.problem, schedule, ctx.cfg.n_steps, ctx.cfg.start(), ctx.cfg.averaging};
  const SaTrajectory t = run_sa(sc, sa_source, &curve);
  auto out = ctx.open("trajectory" + suffix + ".csv");
  write_trajectory_csv(out, t);
  write_summary_line(summary, "sa" + suffix + ".final_iterate", t.iterates.back());
  write_summary_line(summary, "sa" + suffix + ".final_averaged", t.averaged.back());
  write_summary_line(summary, "sa" + suffix + ".estimate", t.estimate());
}

ExitCode run_mode(Context& ctx) {
  const auto& c = ctx.cfg;
  std::optional<std::vector<PricePath>> cycles;
  if (c.source_kind == "replay" && c.mode != "synth-ticks" && c.mode != "calibrate") cycles = load_cycles(c);
  const std::vector<PricePath>* cyc = cycles ? &*cycles : nullptr;

  if (c.mode == "synth-ticks") {
    TickSynthesis spec;
    spec.s0 = c.S0;
    spec.sigma = c.sigma;
    spec.mean_spacing = c.T / c.cycle_length;
    spec.n_ticks = static_cast<std::size_t>(c.cycle_length) * c.n_steps;
    spec.seed = c.seed;
    auto out = ctx.open("ticks.csv");
    write_ticks_csv(out, synthesize_ticks(spec));
    return ExitCode::ok;
  }

  if (c.mode == "calibrate") {
    if (c.calibration_file.empty()) throw DataLoadError("calibration.file is required");
    std::vector<CalibrationPoint> pts;
    try {
      pts = load_calibration_points(c.calibration_file);
    } catch (const ParseError& e) {
      throw DataLoadError(e.what());
    } catch (const ValidationError& e) {
      throw DataLoadError(e.what());
    }
    const IntensityModel m = calibrate_intensity(pts);
    auto out = ctx.open("calibration.txt");
    write_summary_line(out, "model.A", m.A);
    write_summary_line(out, "model.k", m.k);
    out << "points = " << pts.size() << '\n';
    return ExitCode::ok;
  }

  const auto source = make_source(c, 0, cyc);

  if (c.mode == "cost-curve") {
    const CostCurve curve = curve_step(ctx, *source, c.M);
    const GridMin g = grid_argmin(curve);
    auto s = ctx.open("summary.txt");
    write_summary_line(s, "delta_star_grid", g.delta);
    write_summary_line(s, "c_min", g.c);
    return ExitCode::ok;
  }

  if (c.mode == "run-sa" || c.mode == "replay-sa") {
    const CostCurve curve = curve_step(ctx, *source, c.M);
    const GridMin g = grid_argmin(curve);
    auto s = ctx.open("summary.txt");
    write_summary_line(s, "delta_star_grid", g.delta);
    write_summary_line(s, "c_min", g.c);
    const auto sa_source = cyc ? make_source(c, 0, cyc) : make_source(c, kSaStreamOffset, cyc);
    const StepSchedule sched = c.schedule();
    sa_step_artifacts(ctx, *sa_source, curve, s, "", sched);
    if (sched.rho != 1.0) sa_step_artifacts(ctx, *sa_source, curve, s, "_crude", StepSchedule{sched.gamma1, 1.0});
    if (cyc) {
      auto co = ctx.open("cycles.csv");
      write_cycles_csv(co, *cyc);
      std::vector<std::size_t> checkpoints;
      for (std::size_t n = 10; n <= cyc->size(); n *= 2) checkpoints.push_back(n);
      checkpoints.push_back(cyc->size());
      const auto rep = averaging_rate_check(*cyc, sched, checkpoints, 2000, c.seed);
      auto ar = ctx.open("averaging_rate.csv");
      csv::write_header(ar, {"n", "discrepancy", "n_D_gamma"});
      for (const auto& p : rep.points) csv::write_row(ar, {static_cast<double>(p.n), p.discrepancy, p.term});
      s << "averaging_rate.exact = " << (rep.exact ? "true" : "false (sampled-corner lower bound)") << '\n';
      s << "averaging_rate.decreasing = " << (rep.decreasing ? "true" : "false") << '\n';
    }
    return ExitCode::ok;
  }

  if (c.mode == "check-criteria") {
    const std::size_t M = cyc ? std::min(c.M, cyc->size()) : c.M;
    double expected_ST = c.expected_ST;
    double s_star = c.s_star;
    if (expected_ST == 0.0 || s_star == 0.0) {
      RunningStats terminal;
      double top = 0.0;
      for (std::size_t i = 0; i < M; ++i) {
        const PricePath p = source->path(i);
        terminal.add(p.terminal());
        for (double v : p.values) top = std::max(top, v);
      }
      if (expected_ST == 0.0) expected_ST = (c.source_kind == "brownian") ? c.S0 : terminal.mean;
      if (s_star == 0.0) s_star = top;
    }
    const auto coarse = uniform_grid(c.grid_lo, c.grid_hi > 0.0 ? c.grid_hi : c.delta_max, 50);
    const std::size_t sharp_M = cyc ? std::min(c.sharp_M, cyc->size()) : c.sharp_M;
    std::optional<SharpBounds> sharp;
    if (sharp_M >= 100) sharp = sharp_bounds_mc(ctx.problem, *source, sharp_M, coarse);
    const CriteriaReport r = check_criteria(ctx.problem, expected_ST, s_star, sharp);
    auto out = ctx.open("criteria.txt");
    write_criteria_report(out, r, c.Q);
    if (ctx.opt.strict_criteria && !r.all_conservative_ok(c.Q)) {
      ctx.log("criteria violation: at least one conservative bound fails (see criteria.txt)");
      return ExitCode::criteria_violation;
    }
    return ExitCode::ok;
  }

  // comonotony-test
  const std::size_t M = cyc ? std::min(c.M, cyc->size()) : c.M;
  std::vector<MonotoneFunctional> fs = {functionals::terminal(), functionals::running_max(),
                                        functionals::running_min(), functionals::time_mean(),
                                        functionals::lambda_at_zero(ctx.problem.model, c.S0)};
  fs.push_back(functionals::negated(functionals::terminal()));
  auto out = ctx.open("comonotony.csv");
  out << "F,G,same_monotony,cov,se,M,consistent\n";
  for (std::size_t i = 0; i < fs.size(); ++i) {
    for (std::size_t j = i; j < fs.size(); ++j) {
      const auto e = estimate_covariance(fs[i], fs[j], *source, M);
      out << fs[i].name << ',' << fs[j].name << ',' << (e.same_monotony ? 1 : 0) << ',' << csv::format(e.cov) << ','
          << csv::format(e.se) << ',' << e.M << ',' << (e.consistent() ? 1 : 0) << '\n';
    }
  }
  auto audit = ctx.open("monotony_audit.txt");
  for (const auto& f : fs) audit << f.name << " = " << (audit_monotony(f, *source, 100, c.seed) ? "PASS" : "FAIL") << '\n';
  if (c.source_kind == "euler") {
    const DiffusionSpec spec = diffusion_of(c);
    const double x1 = c.S0;
    const auto xs = uniform_grid(0.05 * x1, 5.0 * x1, 200);
    const auto ts = uniform_grid(0.0, c.T, 5);
    const auto rep = admissibility_report(spec, ts, xs, x1);
    auto adm = ctx.open("admissibility.txt");
    write_summary_line(adm, "g_min", rep.g_min);
    write_summary_line(adm, "g_max", rep.g_max);
    adm << "bounded_heuristic = " << (rep.bounded ? "true" : "false") << '\n';
    adm << "non_negative = " << (rep.non_negative ? "true" : "false") << '\n';
    write_summary_line(adm, "lower.increment_ratio", rep.lower.increment_ratio);
    write_summary_line(adm, "upper.increment_ratio", rep.upper.increment_ratio);
    adm << "condition_iii_heuristic = " << (rep.condition_iii ? "true" : "false") << '\n';
    adm << "admissible = " << (rep.admissible ? "true" : "false") << '\n';
  }
  return ExitCode::ok;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void write_manifest(Context& ctx) {
  const std::string text = ctx.cfg.to_text();
  std::ofstream out(fs::path(ctx.cfg.out_dir) / "manifest.txt", std::ios::binary);
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
  out << "version = " << kVersion << '\n';
  out << "mode = " << ctx.cfg.mode << '\n';
  out << "seed = " << ctx.cfg.seed << '\n';
  out << "config_hash = fnv1a64:" << hash << '\n';
  out << "threads = " << max_threads() << '\n';
  out << "created = " << timestamp() << '\n';
  out << "artifacts = ";
  for (std::size_t i = 0; i < ctx.artifacts.size(); ++i) out << (i ? "," : "") << ctx.artifacts[i];
  out << "\n\n# config\n" << text;
}

}  // namespace

ExitCode run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  auto log = [&](const std::string& s) {
    if (opt.log) *opt.log << s << '\n';
  };
  std::optional<CostModel> problem;
  try {
    cfg.validate();
    problem = cfg.problem();
  } catch (const std::exception& e) {
    log(std::string("config error: ") + e.what());
    return ExitCode::config_parse;
  }
  if (opt.dry_run) {
    if (opt.log) *opt.log << cfg.to_text();
    return ExitCode::ok;
  }
  if (cfg.threads > 0) set_threads(cfg.threads);
  Context ctx{cfg, opt, *problem, {}};
  try {
    fs::create_directories(cfg.out_dir);
    const ExitCode code = run_mode(ctx);
    write_manifest(ctx);
    return code;
  } catch (const DataLoadError& e) {
    log(std::string("data load error: ") + e.what());
    return ExitCode::data_load;
  } catch (const NumericFault& e) {
    log(std::string("numeric fault: ") + e.what());
    return ExitCode::numeric_fault;
  } catch (const DegenerateConditioning& e) {
    log(std::string("numeric fault: ") + e.what());
    return ExitCode::numeric_fault;
  } catch (const SourceExhausted& e) {
    log(std::string("numeric fault: ") + e.what());
    return ExitCode::numeric_fault;
  } catch (const DomainError& e) {
    log(std::string("numeric fault: ") + e.what());
    return ExitCode::numeric_fault;
  }
}

}  // namespace limitpost
