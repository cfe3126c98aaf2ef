#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "limitpost/price_path.hpp"
#include "limitpost/rng.hpp"

namespace limitpost {

// Arithmetic Brownian motion on a uniform grid; increment k uses rng.normal(k).
PricePath simulate_brownian(double s0, double sigma, double T, int m, const RngStream& rng);

using Coefficient = std::function<double(double t, double x)>;

// dX = b(t,X) dt + sigma(t,X) dW on the open interval (lower, upper).
// Missing derivative callbacks are replaced by central differences.
struct DiffusionSpec {
  std::string name;
  Coefficient drift;
  Coefficient vol;
  Coefficient drift_dx;
  Coefficient vol_dt;
  Coefficient vol_dx;
  Coefficient vol_dxx;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x > lower && x < upper; }
  double b(double t, double x) const { return drift(t, x); }
  double s(double t, double x) const { return vol(t, x); }
  double b_x(double t, double x) const;
  double s_t(double t, double x) const;
  double s_x(double t, double x) const;
  double s_xx(double t, double x) const;
};

namespace diffusions {
DiffusionSpec bachelier(double mu, double sigma);
DiffusionSpec black_scholes(double r, double vartheta);
// Geometric Brownian motion with deterministic volatility vartheta(t).
DiffusionSpec hull_white(double r, std::function<double(double)> vartheta, std::function<double(double)> vartheta_dt);
// b = r x, sigma = vartheta(x) x with vartheta(x) = v0 + v1 / (1 + x^2 / c^2) bounded below by v0 > 0.
DiffusionSpec bounded_local_vol(double r, double v0, double v1, double c);
DiffusionSpec cev(double r, double vartheta, double alpha);
}  // namespace diffusions

struct EulerResult {
  PricePath path;
  bool exited = false;  // some sample left the open interval
};

// Stepwise-constant Euler scheme; increment k uses rng.normal(k).
EulerResult simulate_euler(const DiffusionSpec& spec, double x0, double T, int m, const RngStream& rng);

// Sliding windows of `cycle_length` ticks advanced by `shift`; times rebased to 0.
std::vector<PricePath> replay_source(std::span<const double> times, std::span<const double> values, int cycle_length,
                                     int shift);

// Random-access sequence of paths. Index n is the n-th replication or cycle.
class PathSource {
 public:
  virtual ~PathSource() = default;
  // Throws SourceExhausted when index is past the end.
  virtual PricePath path(std::size_t index) const = 0;
  virtual std::optional<std::size_t> size() const = 0;
};

class BrownianSource final : public PathSource {
 public:
  BrownianSource(double s0, double sigma, double T, int m, std::uint64_t seed, std::uint64_t stream_offset = 0);
  PricePath path(std::size_t index) const override;
  std::optional<std::size_t> size() const override { return std::nullopt; }
  double s0() const { return s0_; }

 private:
  double s0_, sigma_, T_;
  int m_;
  std::uint64_t seed_, offset_;
};

class EulerSource final : public PathSource {
 public:
  enum class ExitPolicy { keep, reject };
  EulerSource(DiffusionSpec spec, double x0, double T, int m, std::uint64_t seed, std::uint64_t stream_offset = 0,
              ExitPolicy policy = ExitPolicy::keep);
  PricePath path(std::size_t index) const override;
  std::optional<std::size_t> size() const override { return std::nullopt; }

 private:
  DiffusionSpec spec_;
  double x0_, T_;
  int m_;
  std::uint64_t seed_, offset_;
  ExitPolicy policy_;
};

class ReplaySource final : public PathSource {
 public:
  explicit ReplaySource(std::vector<PricePath> paths) : paths_(std::move(paths)) {}
  PricePath path(std::size_t index) const override;
  std::optional<std::size_t> size() const override { return paths_.size(); }
  const std::vector<PricePath>& paths() const { return paths_; }

 private:
  std::vector<PricePath> paths_;
};

struct Discrepancy {
  double value = 0.0;
  bool exact = true;  // false: lower bound from sampled corners
};

struct DiscrepancyOptions {
  std::size_t sampled_corners = 100000;  // used when d > 2
  std::uint64_t seed = 0;
};

// Star discrepancy of `points` in [0,L]^d against the product-uniform law on
// [0,L]^d (reference empty) or the empirical law of `reference`.
Discrepancy star_discrepancy(const std::vector<std::vector<double>>& points, double L,
                             const std::vector<std::vector<double>>* reference = nullptr,
                             const DiscrepancyOptions& opts = {});

}  // namespace limitpost
