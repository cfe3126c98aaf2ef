#include "limitpost/price_paths.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "limitpost/errors.hpp"

namespace limitpost {
namespace {

double step_for(double x) { return 1e-5 * std::max(1.0, std::abs(x)); }

}  // namespace

PricePath simulate_brownian(double s0, double sigma, double T, int m, const RngStream& rng) {
  if (m < 1) throw DomainError("simulate_brownian: m must be >= 1");
  if (!(sigma >= 0.0)) throw DomainError("simulate_brownian: sigma must be >= 0");
  if (!(T > 0.0)) throw DomainError("simulate_brownian: T must be positive");
  std::vector<double> v(static_cast<std::size_t>(m) + 1);
  v[0] = s0;
  const double sd = sigma * std::sqrt(T / m);
  for (int k = 0; k < m; ++k) v[k + 1] = v[k] + (sigma == 0.0 ? 0.0 : sd * rng.normal(k));
  return PricePath::uniform(std::move(v), T);
}

double DiffusionSpec::b_x(double t, double x) const {
  if (drift_dx) return drift_dx(t, x);
  const double h = step_for(x);
  return (drift(t, x + h) - drift(t, x - h)) / (2 * h);
}

double DiffusionSpec::s_t(double t, double x) const {
  if (vol_dt) return vol_dt(t, x);
  const double h = 1e-5;
  return (vol(t + h, x) - vol(std::max(0.0, t - h), x)) / (t + h - std::max(0.0, t - h));
}

double DiffusionSpec::s_x(double t, double x) const {
  if (vol_dx) return vol_dx(t, x);
  const double h = step_for(x);
  return (vol(t, x + h) - vol(t, x - h)) / (2 * h);
}

double DiffusionSpec::s_xx(double t, double x) const {
  if (vol_dxx) return vol_dxx(t, x);
  const double h = 1e-4 * std::max(1.0, std::abs(x));
  return (vol(t, x + h) - 2 * vol(t, x) + vol(t, x - h)) / (h * h);
}

namespace diffusions {

DiffusionSpec bachelier(double mu, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("bachelier: sigma must be positive");
  DiffusionSpec d;
  d.name = "bachelier";
  d.drift = [mu](double, double) { return mu; };
  d.vol = [sigma](double, double) { return sigma; };
  d.drift_dx = [](double, double) { return 0.0; };
  d.vol_dt = d.drift_dx;
  d.vol_dx = d.drift_dx;
  d.vol_dxx = d.drift_dx;
  return d;
}

DiffusionSpec black_scholes(double r, double vartheta) {
  if (!(vartheta > 0.0)) throw DomainError("black_scholes: vartheta must be positive");
  DiffusionSpec d;
  d.name = "black_scholes";
  d.drift = [r](double, double x) { return r * x; };
  d.vol = [vartheta](double, double x) { return vartheta * x; };
  d.drift_dx = [r](double, double) { return r; };
  d.vol_dt = [](double, double) { return 0.0; };
  d.vol_dx = [vartheta](double, double) { return vartheta; };
  d.vol_dxx = [](double, double) { return 0.0; };
  d.lower = 0.0;
  return d;
}

DiffusionSpec hull_white(double r, std::function<double(double)> vartheta, std::function<double(double)> vartheta_dt) {
  DiffusionSpec d;
  d.name = "hull_white";
  d.drift = [r](double, double x) { return r * x; };
  d.vol = [vartheta](double t, double x) { return vartheta(t) * x; };
  d.drift_dx = [r](double, double) { return r; };
  d.vol_dt = [vartheta_dt](double t, double x) { return vartheta_dt(t) * x; };
  d.vol_dx = [vartheta](double t, double) { return vartheta(t); };
  d.vol_dxx = [](double, double) { return 0.0; };
  d.lower = 0.0;
  return d;
}

DiffusionSpec bounded_local_vol(double r, double v0, double v1, double c) {
  if (!(v0 > 0.0) || !(v1 >= 0.0) || !(c > 0.0)) throw DomainError("local vol: need v0 > 0, v1 >= 0, c > 0");
  DiffusionSpec d;
  d.name = "bounded_local_vol";
  auto theta = [=](double x) { return v0 + v1 / (1.0 + x * x / (c * c)); };
  auto theta_x = [=](double x) {
    const double u = 1.0 + x * x / (c * c);
    return -v1 * 2.0 * x / (c * c) / (u * u);
  };
  auto theta_xx = [=](double x) {
    const double c2 = c * c;
    const double u = 1.0 + x * x / c2;
    return -v1 * 2.0 / c2 / (u * u) + v1 * 8.0 * x * x / (c2 * c2) / (u * u * u);
  };
  d.drift = [r](double, double x) { return r * x; };
  d.vol = [theta](double, double x) { return theta(x) * x; };
  d.drift_dx = [r](double, double) { return r; };
  d.vol_dt = [](double, double) { return 0.0; };
  d.vol_dx = [theta, theta_x](double, double x) { return theta(x) + x * theta_x(x); };
  d.vol_dxx = [theta_x, theta_xx](double, double x) { return 2.0 * theta_x(x) + x * theta_xx(x); };
  d.lower = 0.0;
  return d;
}

DiffusionSpec cev(double r, double vartheta, double alpha) {
  if (!(vartheta > 0.0) || !(alpha > 0.0 && alpha < 1.0)) throw DomainError("cev: need vartheta > 0, 0 < alpha < 1");
  DiffusionSpec d;
  d.name = "cev";
  d.drift = [r](double, double x) { return r * x; };
  d.vol = [=](double, double x) { return vartheta * std::pow(x, alpha); };
  d.drift_dx = [r](double, double) { return r; };
  d.vol_dt = [](double, double) { return 0.0; };
  d.vol_dx = [=](double, double x) { return vartheta * alpha * std::pow(x, alpha - 1.0); };
  d.vol_dxx = [=](double, double x) { return vartheta * alpha * (alpha - 1.0) * std::pow(x, alpha - 2.0); };
  d.lower = 0.0;
  return d;
}

}  // namespace diffusions

EulerResult simulate_euler(const DiffusionSpec& spec, double x0, double T, int m, const RngStream& rng) {
  if (m < 1) throw DomainError("simulate_euler: m must be >= 1");
  if (!(T > 0.0)) throw DomainError("simulate_euler: T must be positive");
  if (!spec.contains(x0)) throw DomainError("simulate_euler: x0 outside the state interval");
  EulerResult out;
  std::vector<double> v(static_cast<std::size_t>(m) + 1);
  v[0] = x0;
  const double dt = T / m;
  const double sq = std::sqrt(dt);
  for (int k = 0; k < m; ++k) {
    const double t = k * dt;
    const double s = spec.s(t, v[k]);
    v[k + 1] = v[k] + spec.b(t, v[k]) * dt + (s == 0.0 ? 0.0 : s * sq * rng.normal(k));
    if (!spec.contains(v[k + 1])) out.exited = true;
  }
  out.path = PricePath::uniform(std::move(v), T);
  return out;
}

std::vector<PricePath> replay_source(std::span<const double> times, std::span<const double> values, int cycle_length,
                                     int shift) {
  if (times.size() != values.size()) throw DomainError("replay: times/values length mismatch");
  if (cycle_length < 2) throw DomainError("replay: cycle_length must be >= 2");
  if (shift < 1) throw DomainError("replay: shift must be >= 1");
  if (values.size() < static_cast<std::size_t>(cycle_length)) throw DomainError("replay: series shorter than one cycle");
  std::vector<PricePath> out;
  const std::size_t len = static_cast<std::size_t>(cycle_length);
  for (std::size_t start = 0; start + len <= values.size(); start += static_cast<std::size_t>(shift)) {
    PricePath p;
    p.rule = Quadrature::right;
    p.times.resize(len);
    p.values.assign(values.begin() + static_cast<std::ptrdiff_t>(start),
                    values.begin() + static_cast<std::ptrdiff_t>(start + len));
    for (std::size_t i = 0; i < len; ++i) p.times[i] = times[start + i] - times[start];
    out.push_back(std::move(p));
  }
  return out;
}

BrownianSource::BrownianSource(double s0, double sigma, double T, int m, std::uint64_t seed, std::uint64_t stream_offset)
    : s0_(s0), sigma_(sigma), T_(T), m_(m), seed_(seed), offset_(stream_offset) {
  if (m < 1 || !(sigma >= 0.0) || !(T > 0.0)) throw DomainError("BrownianSource: invalid parameters");
}

PricePath BrownianSource::path(std::size_t index) const {
  return simulate_brownian(s0_, sigma_, T_, m_, RngStream{seed_, offset_ + index});
}

EulerSource::EulerSource(DiffusionSpec spec, double x0, double T, int m, std::uint64_t seed,
                         std::uint64_t stream_offset, ExitPolicy policy)
    : spec_(std::move(spec)), x0_(x0), T_(T), m_(m), seed_(seed), offset_(stream_offset), policy_(policy) {}

PricePath EulerSource::path(std::size_t index) const {
  RngStream rng{seed_, offset_ + index};
  for (int attempt = 0; attempt < 64; ++attempt) {
    auto r = simulate_euler(spec_, x0_, T_, m_, rng);
    if (!r.exited || policy_ == ExitPolicy::keep) return std::move(r.path);
    rng = rng.substream(static_cast<std::uint64_t>(attempt) + 1);
  }
  throw NumericFault("EulerSource: path left the state interval on 64 consecutive draws (" + spec_.name + ")");
}

PricePath ReplaySource::path(std::size_t index) const {
  if (index >= paths_.size()) {
    throw SourceExhausted("replay source exhausted at index " + std::to_string(index) + " of " +
                          std::to_string(paths_.size()));
  }
  return paths_[index];
}

namespace {

std::vector<double> axis(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>* b,
                         std::size_t dim, double L) {
  std::vector<double> g;
  g.reserve(a.size() + (b ? b->size() : 0) + 1);
  for (const auto& p : a) g.push_back(p[dim]);
  if (b) {
    for (const auto& p : *b) g.push_back(p[dim]);
  }
  g.push_back(L);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

double corner_gap(const std::vector<std::vector<double>>& pts, const std::vector<std::vector<double>>* ref,
                  const std::vector<double>& c, double L) {
  const double n = static_cast<double>(pts.size());
  std::size_t closed = 0, open = 0;
  for (const auto& p : pts) {
    bool le = true, lt = true;
    for (std::size_t i = 0; i < c.size() && le; ++i) {
      le = p[i] <= c[i];
      lt = lt && p[i] < c[i];
    }
    closed += le;
    open += le && lt;
  }
  if (ref) {
    std::size_t rc = 0;
    for (const auto& p : *ref) {
      bool le = true;
      for (std::size_t i = 0; i < c.size() && le; ++i) le = p[i] <= c[i];
      rc += le;
    }
    return std::abs(closed / n - rc / static_cast<double>(ref->size()));
  }
  double vol = 1.0;
  for (double x : c) vol *= x / L;
  return std::max(closed / n - vol, vol - open / n);
}

double exact_low_dim(const std::vector<std::vector<double>>& pts, const std::vector<std::vector<double>>* ref,
                     double L, std::size_t d) {
  const double n = static_cast<double>(pts.size());
  const double nr = ref ? static_cast<double>(ref->size()) : 1.0;
  double best = 0.0;
  if (d == 1) {
    std::vector<double> xs, rs;
    for (const auto& p : pts) xs.push_back(p[0]);
    std::sort(xs.begin(), xs.end());
    if (ref) {
      for (const auto& p : *ref) rs.push_back(p[0]);
      std::sort(rs.begin(), rs.end());
    }
    for (double a : axis(pts, ref, 0, L)) {
      const double closed = std::upper_bound(xs.begin(), xs.end(), a) - xs.begin();
      if (ref) {
        const double rc = std::upper_bound(rs.begin(), rs.end(), a) - rs.begin();
        best = std::max(best, std::abs(closed / n - rc / nr));
      } else {
        const double open = std::lower_bound(xs.begin(), xs.end(), a) - xs.begin();
        best = std::max({best, closed / n - a / L, a / L - open / n});
      }
    }
    return best;
  }
  // d == 2: sweep the first coordinate, keep sorted second coordinates.
  auto by_x = pts;
  std::sort(by_x.begin(), by_x.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
  std::vector<std::vector<double>> ref_x;
  if (ref) {
    ref_x = *ref;
    std::sort(ref_x.begin(), ref_x.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
  }
  const auto gx = axis(pts, ref, 0, L);
  const auto gy = axis(pts, ref, 1, L);
  std::vector<double> closed_y, open_y, ref_y;
  std::size_t ic = 0, io = 0, ir = 0;
  auto insert_sorted = [](std::vector<double>& v, double y) { v.insert(std::upper_bound(v.begin(), v.end(), y), y); };
  for (double a : gx) {
    while (io < by_x.size() && by_x[io][0] < a) insert_sorted(open_y, by_x[io++][1]);
    while (ic < by_x.size() && by_x[ic][0] <= a) insert_sorted(closed_y, by_x[ic++][1]);
    while (ref && ir < ref_x.size() && ref_x[ir][0] <= a) insert_sorted(ref_y, ref_x[ir++][1]);
    for (double b : gy) {
      const double closed = std::upper_bound(closed_y.begin(), closed_y.end(), b) - closed_y.begin();
      if (ref) {
        const double rc = std::upper_bound(ref_y.begin(), ref_y.end(), b) - ref_y.begin();
        best = std::max(best, std::abs(closed / n - rc / nr));
      } else {
        const double open = std::lower_bound(open_y.begin(), open_y.end(), b) - open_y.begin();
        const double vol = (a / L) * (b / L);
        best = std::max({best, closed / n - vol, vol - open / n});
      }
    }
  }
  return best;
}

}  // namespace

Discrepancy star_discrepancy(const std::vector<std::vector<double>>& points, double L,
                             const std::vector<std::vector<double>>* reference, const DiscrepancyOptions& opts) {
  if (points.empty()) throw DomainError("star_discrepancy: no points");
  if (!(L > 0.0)) throw DomainError("star_discrepancy: L must be positive");
  const std::size_t d = points[0].size();
  if (d == 0) throw DomainError("star_discrepancy: dimension must be >= 1");
  auto check = [&](const std::vector<std::vector<double>>& set) {
    for (const auto& p : set) {
      if (p.size() != d) throw DomainError("star_discrepancy: inconsistent dimension");
      for (double x : p) {
        if (!(x >= 0.0 && x <= L)) throw DomainError("star_discrepancy: coordinate outside [0, L]");
      }
    }
  };
  check(points);
  if (reference) {
    if (reference->empty()) throw DomainError("star_discrepancy: empty reference");
    check(*reference);
  }
  if (d <= 2) return {exact_low_dim(points, reference, L, d), true};

  std::vector<std::vector<double>> grids(d);
  for (std::size_t i = 0; i < d; ++i) grids[i] = axis(points, reference, i, L);
  RngStream rng{opts.seed, 0x5eed};
  double best = 0.0;
  std::vector<double> corner(d);
  for (std::size_t s = 0; s < opts.sampled_corners; ++s) {
    for (std::size_t i = 0; i < d; ++i) {
      const double u = rng.uniform(s * d + i);
      const auto& g = grids[i];
      corner[i] = g[std::min(g.size() - 1, static_cast<std::size_t>(u * g.size()))];
    }
    best = std::max(best, corner_gap(points, reference, corner, L));
  }
  return {best, false};
}

}  // namespace limitpost
