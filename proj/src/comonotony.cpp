#include "limitpost/comonotony.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "limitpost/errors.hpp"

namespace limitpost {

namespace functionals {

MonotoneFunctional terminal() {
  return {"terminal", [](const PricePath& p) { return p.terminal(); }, Monotony::non_decreasing, 1.0};
}

MonotoneFunctional running_max() {
  return {"max", [](const PricePath& p) { return *std::max_element(p.values.begin(), p.values.end()); },
          Monotony::non_decreasing, 1.0};
}

MonotoneFunctional running_min() {
  return {"min", [](const PricePath& p) { return *std::min_element(p.values.begin(), p.values.end()); },
          Monotony::non_decreasing, 1.0};
}

MonotoneFunctional time_mean() {
  return {"mean",
          [](const PricePath& p) {
            double s = 0.0;
            for (double v : p.values) s += v;
            return s / static_cast<double>(p.values.size());
          },
          Monotony::non_decreasing, 1.0};
}

MonotoneFunctional lambda_at_zero(const IntensityModel& model, double s_ref) {
  return {"lambda0",
          [model, s_ref](const PricePath& p) {
            double s = 0.0;
            for (std::size_t i = 0; i + 1 < p.size(); ++i) {
              s += (p.times[i + 1] - p.times[i]) * std::exp(-model.k * (p.values[i] - s_ref));
            }
            return model.A * s;
          },
          Monotony::non_increasing, 0.0};
}

MonotoneFunctional negated(const MonotoneFunctional& f) {
  auto inner = f.eval;
  return {"neg_" + f.name, [inner](const PricePath& p) { return -inner(p); },
          f.monotony == Monotony::non_decreasing ? Monotony::non_increasing : Monotony::non_decreasing,
          f.growth_exponent};
}

}  // namespace functionals

bool audit_monotony(const MonotoneFunctional& f, const PathSource& source, std::size_t pairs, std::uint64_t seed) {
  const RngStream rng{seed, 0xa0d17};
  std::uint64_t draw = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const PricePath alpha = source.path(i);
    PricePath beta = alpha;
    double scale = 0.0;
    for (double v : alpha.values) scale = std::max(scale, std::abs(v));
    scale = 0.05 * (1.0 + scale);
    for (double& v : beta.values) {
      if (rng.uniform(draw++) < 0.5) v += scale * rng.uniform(draw++);
    }
    const double fa = f.eval(alpha), fb = f.eval(beta);
    const bool ok = f.monotony == Monotony::non_decreasing ? fa <= fb : fa >= fb;
    if (!ok) return false;
  }
  return true;
}

CovarianceEstimate covariance_with_jackknife(std::span<const double> x, std::span<const double> y) {
  const std::size_t M = x.size();
  if (M < 3 || y.size() != M) throw DomainError("covariance: need >= 3 paired samples");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw NumericFault("covariance: non-finite functional value");
    mx += x[i];
    my += y[i];
  }
  const double n = static_cast<double>(M);
  mx /= n;
  my /= n;
  double s = 0.0;
  for (std::size_t i = 0; i < M; ++i) s += (x[i] - mx) * (y[i] - my);
  CovarianceEstimate out;
  out.M = M;
  out.cov = s / (n - 1.0);
  // Leave-one-out covariance on centred data: (S - u_i v_i n/(n-1)) / (n-2).
  const double np = n - 1.0;
  double mean_loo = 0.0;
  for (std::size_t i = 0; i < M; ++i) mean_loo += (s - (x[i] - mx) * (y[i] - my) * (1.0 + 1.0 / np)) / (np - 1.0);
  mean_loo /= n;
  double ss = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    const double loo = (s - (x[i] - mx) * (y[i] - my) * (1.0 + 1.0 / np)) / (np - 1.0);
    ss += (loo - mean_loo) * (loo - mean_loo);
  }
  out.se = std::sqrt(ss * (n - 1.0) / n);
  return out;
}

CovarianceEstimate estimate_covariance(const MonotoneFunctional& F, const MonotoneFunctional& G,
                                       const PathSource& source, std::size_t M, Execution exec) {
  if (M < 100) throw DomainError("estimate_covariance: M must be >= 100");
  require_paths(source, M);
  const auto table = mc_tabulate(
      M, 2,
      [&](std::size_t i, std::span<double> out) {
        const PricePath p = source.path(i);
        out[0] = F.eval(p);
        out[1] = G.eval(p);
      },
      exec);
  std::vector<double> x(M), y(M);
  for (std::size_t i = 0; i < M; ++i) {
    x[i] = table[2 * i];
    y[i] = table[2 * i + 1];
  }
  auto est = covariance_with_jackknife(x, y);
  est.same_monotony = F.monotony == G.monotony;
  return est;
}

PathwiseMonotony check_pathwise_H_monotone(const CostModel& p, std::span<const double> delta_grid,
                                           const std::vector<PricePath>& paths, double tolerance) {
  PathwiseMonotony r;
  std::size_t pass = 0;
  for (const auto& path : paths) {
    bool mono = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (double d : delta_grid) {
      const double h = h_func(p, d, path);
      if (h < prev - tolerance) mono = false;
      prev = h;
    }
    r.monotone.push_back(mono);
    pass += mono;
  }
  r.pass_rate = paths.empty() ? 0.0 : static_cast<double>(pass) / static_cast<double>(paths.size());
  return r;
}

namespace {

constexpr double kQuadTol = 1e-12;

template <class F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  if (depth <= 0) throw NumericFault("adaptive Simpson: no convergence");
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double tol = kQuadTol) {
  if (a == b) return 0.0;
  if (b < a) return -integrate(f, b, a, tol);
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scale = std::max(1.0, std::abs(whole));
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol * scale, 60);
}

void require_inside(const DiffusionSpec& spec, double x, const char* what) {
  if (!spec.contains(x)) throw DomainError(std::string(what) + " outside the state interval");
}

}  // namespace

double lamperti_transform(const DiffusionSpec& spec, double x1, double x, double t) {
  require_inside(spec, x1, "x1");
  require_inside(spec, x, "x");
  return integrate([&](double xi) { return 1.0 / spec.s(t, xi); }, x1, x);
}

double lamperti_inverse(const DiffusionSpec& spec, double x1, double y, double t) {
  require_inside(spec, x1, "x1");
  if (y == 0.0) return x1;
  const double w0 = std::max(1.0, std::abs(x1));
  double lo = x1, hi = x1;
  // A quadrature failure while probing toward an endpoint means the integral is
  // unresolvable there, so y counts as unreachable.
  const auto probe = [&](double x) -> std::optional<double> {
    try {
      return lamperti_transform(spec, x1, x, t);
    } catch (const NumericFault&) {
      return std::nullopt;
    }
  };
  bool bracketed = false;
  for (int j = 1; j <= 200 && !bracketed; ++j) {
    if (y > 0.0) {
      hi = std::isfinite(spec.upper) ? spec.upper - (spec.upper - x1) * std::ldexp(1.0, -j) : x1 + w0 * std::ldexp(1.0, j);
      if (!spec.contains(hi)) break;
      const auto v = probe(hi);
      if (!v) break;
      bracketed = *v >= y;
      if (!bracketed) lo = hi;
    } else {
      lo = std::isfinite(spec.lower) ? spec.lower + (x1 - spec.lower) * std::ldexp(1.0, -j) : x1 - w0 * std::ldexp(1.0, j);
      if (!spec.contains(lo)) break;
      const auto v = probe(lo);
      if (!v) break;
      bracketed = *v <= y;
      if (!bracketed) hi = lo;
    }
  }
  if (!bracketed) throw DomainError("lamperti_inverse: y outside L(t, I)");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (lamperti_transform(spec, x1, mid, t) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double lamperti_beta(const DiffusionSpec& spec, double x1, double y, double t) {
  const double x = lamperti_inverse(spec, x1, y, t);
  const double sig = spec.s(t, x);
  const double drift_term = integrate(
      [&](double xi) {
        const double s = spec.s(t, xi);
        return spec.s_t(t, xi) / (s * s);
      },
      x1, x);
  return spec.b(t, x) / sig - drift_term - 0.5 * spec.s_x(t, x);
}

namespace {

EndpointDivergence probe_endpoint(const DiffusionSpec& spec, double x1, double t, bool upper) {
  const double end = upper ? spec.upper : spec.lower;
  auto point = [&](int j) {
    if (std::isfinite(end)) return end + (x1 - end) * std::pow(10.0, -j);
    const double span = (1.0 + std::abs(x1)) * std::pow(10.0, j);
    return upper ? x1 + span : x1 - span;
  };
  auto inv = [&](double xi) { return 1.0 / spec.s(t, xi); };
  constexpr int kDecades = 10;
  double prev_inc = 0.0, last_inc = 0.0;
  double a = x1;
  for (int j = 1; j <= kDecades; ++j) {
    const double b = point(j);
    const double inc = std::abs(integrate(inv, a, b, 1e-10));
    prev_inc = last_inc;
    last_inc = inc;
    a = b;
  }
  EndpointDivergence d;
  d.endpoint = end;
  d.last_increment = last_inc;
  d.increment_ratio = prev_inc > 0.0 ? last_inc / prev_inc : std::numeric_limits<double>::infinity();
  d.diverges = d.increment_ratio >= 0.5;
  return d;
}

}  // namespace

AdmissibilityReport admissibility_report(const DiffusionSpec& spec, std::span<const double> t_grid,
                                         std::span<const double> x_grid, double x1) {
  if (t_grid.empty() || x_grid.empty()) throw DomainError("admissibility_report: empty grid");
  AdmissibilityReport r;
  r.g_min = std::numeric_limits<double>::infinity();
  r.g_max = -std::numeric_limits<double>::infinity();
  r.sigma_positive = true;
  double outer_abs = 0.0;
  const std::size_t nx = x_grid.size();
  const std::size_t inner_lo = nx / 4, inner_hi = nx - nx / 4;
  for (double t : t_grid) {
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = x_grid[i];
      require_inside(spec, x, "grid point");
      const double s = spec.s(t, x);
      const double b = spec.b(t, x);
      if (!(s > 0.0)) r.sigma_positive = false;
      const double g = spec.b_x(t, x) - (b * spec.s_x(t, x) + spec.s_t(t, x)) / s - 0.5 * s * spec.s_xx(t, x);
      r.g_min = std::min(r.g_min, g);
      r.g_max = std::max(r.g_max, g);
      outer_abs = std::max(outer_abs, std::abs(g));
      if (i >= inner_lo && i < inner_hi) r.g_max_inner = std::max(r.g_max_inner, std::abs(g));
      r.linear_growth_b = std::max(r.linear_growth_b, std::abs(b) / (1.0 + std::abs(x)));
      r.linear_growth_sigma = std::max(r.linear_growth_sigma, s / (1.0 + std::abs(x)));
    }
  }
  r.bounded = outer_abs <= 10.0 * std::max(r.g_max_inner, 1e-12);
  r.non_negative = r.g_min >= 0.0;
  const double t0 = t_grid.front();
  r.lower = probe_endpoint(spec, x1, t0, false);
  r.upper = probe_endpoint(spec, x1, t0, true);
  r.condition_iii = r.lower.diverges && r.upper.diverges;
  r.admissible = r.sigma_positive && r.condition_iii && r.bounded;
  return r;
}

int min_euler_steps(const std::function<double(double, double)>& beta, double T, std::span<const double> t_grid,
                    std::span<const double> y_grid) {
  if (!(T > 0.0)) throw DomainError("min_euler_steps: T must be positive");
  double min_slope = std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    for (double y : y_grid) {
      const double h = 1e-4 * std::max(1.0, std::abs(y));
      min_slope = std::min(min_slope, (beta(t, y + h) - beta(t, y - h)) / (2.0 * h));
    }
  }
  if (!std::isfinite(min_slope)) throw NumericFault("min_euler_steps: non-finite slope");
  if (min_slope >= 0.0) return 1;
  return std::max(1, static_cast<int>(std::ceil(-T * min_slope - 1e-9)));
}

int min_euler_steps(const DiffusionSpec& spec, double x1, double T, std::span<const double> t_grid,
                    std::span<const double> y_grid) {
  return min_euler_steps([&](double t, double y) { return lamperti_beta(spec, x1, y, t); }, T, t_grid, y_grid);
}

}  // namespace limitpost
