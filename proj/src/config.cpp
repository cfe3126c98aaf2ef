#include "limitpost/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "limitpost/csv.hpp"
#include "limitpost/errors.hpp"

namespace limitpost {
namespace {

const std::vector<std::string> kModes = {"cost-curve",      "run-sa",    "calibrate", "check-criteria",
                                         "comonotony-test", "replay-sa", "synth-ticks"};

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ParseError(key + ": not a number: '" + v + "'");
  return out;
}

template <class Int>
Int to_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) throw ParseError(key + ": not an integer: '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  throw ParseError(key + ": not a boolean: '" + v + "'");
}

struct Field {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

Field real(std::string key, double ExperimentConfig::*member) {
  return {key, [member](const ExperimentConfig& c) { return csv::format(c.*member); },
          [key, member](ExperimentConfig& c, const std::string& v) { c.*member = to_double(key, v); }};
}

template <class Int>
Field integer(std::string key, Int ExperimentConfig::*member) {
  return {key, [member](const ExperimentConfig& c) { return std::to_string(c.*member); },
          [key, member](ExperimentConfig& c, const std::string& v) { c.*member = to_int<Int>(key, v); }};
}

Field text(std::string key, std::string ExperimentConfig::*member) {
  return {key, [member](const ExperimentConfig& c) { return c.*member; },
          [member](ExperimentConfig& c, const std::string& v) { c.*member = v; }};
}

Field flag(std::string key, bool ExperimentConfig::*member) {
  return {key, [member](const ExperimentConfig& c) { return std::string(c.*member ? "true" : "false"); },
          [key, member](ExperimentConfig& c, const std::string& v) { c.*member = to_bool(key, v); }};
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> f = {
      text("run.mode", &C::mode),
      real("model.A", &C::A),
      real("model.k", &C::k),
      text("penalty.kind", &C::penalty_kind),
      real("penalty.A_prime", &C::a_prime),
      real("penalty.k_prime", &C::k_prime),
      integer("setup.Q", &C::Q),
      real("setup.T", &C::T),
      real("setup.kappa", &C::kappa),
      real("setup.delta_max", &C::delta_max),
      real("setup.S0", &C::S0),
      text("source.kind", &C::source_kind),
      real("source.sigma", &C::sigma),
      integer("source.m", &C::m),
      text("source.diffusion", &C::diffusion),
      real("source.drift", &C::drift),
      real("source.vol", &C::vol),
      real("source.alpha", &C::alpha),
      text("source.file", &C::file),
      integer("source.cycle_length", &C::cycle_length),
      integer("source.shift", &C::shift),
      real("schedule.gamma1", &C::gamma1),
      real("schedule.rho", &C::rho),
      flag("schedule.averaging", &C::averaging),
      real("schedule.delta0", &C::delta0),
      integer("run.M", &C::M),
      integer("run.n_steps", &C::n_steps),
      integer("run.seed", &C::seed),
      integer("run.threads", &C::threads),
      real("grid.lo", &C::grid_lo),
      real("grid.hi", &C::grid_hi),
      integer("grid.points", &C::grid_points),
      text("output.dir", &C::out_dir),
      text("calibration.file", &C::calibration_file),
      real("criteria.expected_ST", &C::expected_ST),
      real("criteria.s_star", &C::s_star),
      integer("criteria.sharp_M", &C::sharp_M),
  };
  return f;
}

}  // namespace

PenaltySpec ExperimentConfig::penalty() const {
  if (penalty_kind == "identity") return PenaltySpec::identity();
  if (penalty_kind == "exponential_impact") return PenaltySpec::exponential_impact(a_prime, k_prime);
  throw ValidationError("penalty.kind must be identity or exponential_impact");
}

CostModel ExperimentConfig::problem() const {
  ExecutionSetup s{Q, T, kappa, delta_max, S0};
  s.validate();
  return CostModel{s, IntensityModel(A, k), penalty()};
}

StepSchedule ExperimentConfig::schedule() const {
  StepSchedule s{gamma1, rho};
  s.validate();
  return s;
}

std::vector<double> ExperimentConfig::grid() const {
  return uniform_grid(grid_lo, grid_hi > 0.0 ? grid_hi : delta_max, grid_points);
}

void ExperimentConfig::validate() const {
  if (std::find(kModes.begin(), kModes.end(), mode) == kModes.end()) throw ValidationError("run.mode: unknown mode '" + mode + "'");
  (void)problem();
  (void)schedule();
  if (source_kind != "brownian" && source_kind != "euler" && source_kind != "replay") {
    throw ValidationError("source.kind must be brownian, euler or replay");
  }
  if (m < 1) throw ValidationError("source.m must be >= 1");
  if (!(sigma >= 0.0)) throw ValidationError("source.sigma must be >= 0");
  if (source_kind == "euler" && diffusion != "bachelier" && diffusion != "black_scholes" && diffusion != "local_vol" &&
      diffusion != "cev") {
    throw ValidationError("source.diffusion must be bachelier, black_scholes, local_vol or cev");
  }
  if (source_kind == "replay" && file.empty() && mode != "synth-ticks") {
    throw ValidationError("source.file is required for replay sources");
  }
  if (cycle_length < 2) throw ValidationError("source.cycle_length must be >= 2");
  if (shift < 1) throw ValidationError("source.shift must be >= 1");
  if (M < 2) throw ValidationError("run.M must be >= 2");
  if (n_steps < 1) throw ValidationError("run.n_steps must be >= 1");
  if (threads < 0) throw ValidationError("run.threads must be >= 0");
  if (grid_points < 2) throw ValidationError("grid.points must be >= 2");
  const double hi = grid_hi > 0.0 ? grid_hi : delta_max;
  if (!(grid_lo >= 0.0 && grid_lo < hi && hi <= delta_max)) throw ValidationError("grid must satisfy 0 <= lo < hi <= delta_max");
  if (delta0 != 0.0 && !(delta0 > 0.0 && delta0 < delta_max)) throw ValidationError("schedule.delta0 must lie in (0, delta_max)");
  if (expected_ST < 0.0 || s_star < 0.0) throw ValidationError("criteria inputs must be >= 0");
  if (sharp_M < 100) throw ValidationError("criteria.sharp_M must be >= 100");
  if (out_dir.empty()) throw ValidationError("output.dir must not be empty");
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream out;
  for (const auto& f : fields()) out << f.key << " = " << f.get(*this) << '\n';
  return out.str();
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      f.set(*this, value);
      return;
    }
  }
  throw ParseError("unknown key '" + key + "'");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const auto body = csv::trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'section.key = value'", lineno);
    const std::string key(csv::trim(body.substr(0, eq)));
    const std::string value(csv::trim(body.substr(eq + 1)));
    try {
      c.set(key, value);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::vector<std::string> preset_names() {
  return {"sim-setting-1", "sim-setting-2", "market-setting-1", "market-setting-2"};
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  if (name == "sim-setting-1" || name == "sim-setting-2") {
    c.mode = "run-sa";
    c.A = 5.0;
    c.k = 1.0;
    c.Q = 10;
    c.T = 5.0;
    c.S0 = 100.0;
    c.delta_max = 1.0;
    c.source_kind = "brownian";
    c.sigma = 0.01;
    c.m = 20;
    c.gamma1 = 1.0 / 100.0;
    c.rho = 1.0;
    c.averaging = true;
    c.M = 10000;
    c.n_steps = 100;
    c.grid_points = 200;
    if (name == "sim-setting-1") {
      c.kappa = 6.0;
      c.penalty_kind = "exponential_impact";
      c.a_prime = 1.0;
      c.k_prime = 0.01;
    } else {
      c.kappa = 12.0;
      c.penalty_kind = "identity";
      c.a_prime = 0.0;
      c.k_prime = 0.0;
    }
    return c;
  }
  if (name == "market-setting-1" || name == "market-setting-2") {
    c.mode = "replay-sa";
    c.A = 1.0 / 50.0;
    c.k = 50.0;
    c.Q = 100;
    c.T = 135.0;  // nominal: 15 trades about 9 s apart
    c.S0 = 10.0;  // nominal: each cycle uses its first tick
    c.delta_max = 0.1;
    c.source_kind = "replay";
    c.sigma = 0.002;  // per sqrt(second), used by synth-ticks
    c.cycle_length = 15;
    c.shift = 15;
    c.rho = 0.95;
    c.averaging = true;
    c.M = 220;
    c.n_steps = 220;
    c.grid_points = 200;
    if (name == "market-setting-1") {
      c.kappa = 1.0;
      c.penalty_kind = "exponential_impact";
      c.a_prime = 0.001;
      c.k_prime = 0.0005;
      c.gamma1 = 1.0 / 550.0;
    } else {
      c.kappa = 1.001;
      c.penalty_kind = "identity";
      c.a_prime = 0.0;
      c.k_prime = 0.0;
      c.gamma1 = 1.0 / 450.0;
    }
    return c;
  }
  throw ParseError("unknown preset '" + name + "'");
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace limitpost
