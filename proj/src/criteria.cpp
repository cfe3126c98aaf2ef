#include "limitpost/criteria.hpp"

#include <cmath>
#include <limits>

#include "limitpost/csv.hpp"
#include "limitpost/errors.hpp"
#include "limitpost/poisson_kernel.hpp"

namespace limitpost {
namespace {

double checked_exp(double log_value) {
  if (log_value > std::log(std::numeric_limits<double>::max())) return std::numeric_limits<double>::infinity();
  return std::exp(log_value);
}

void positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
}

// Standard error of mean(x)/mean(y) by the delta method.
double ratio_se(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  const double r = mx / my;
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = (x[i] - mx) - r * (y[i] - my);
    s += e * e;
  }
  return std::sqrt(s / (n - 1.0) / n) / std::abs(my);
}

}  // namespace

StructuralCheck structural_check(const ExecutionSetup& setup, const IntensityModel& model) {
  StructuralCheck c;
  c.log_threshold = std::log(2.0 * setup.T) + model.log_eval(-setup.S0);
  c.threshold = checked_exp(c.log_threshold);
  c.ok = std::log(static_cast<double>(setup.Q)) >= c.log_threshold;
  return c;
}

double kappa_bound_origin(const ExecutionSetup& setup, const IntensityModel& model, const PenaltySpec& phi,
                          double expected_ST) {
  positive(expected_ST, "E[S_T]");
  const double k = model.k;
  return (1.0 + k * setup.S0) / (k * expected_ST * phi.increment(setup.Q));
}

double kappa_bound_global(const ExecutionSetup& setup, const IntensityModel& model, const PenaltySpec& phi,
                          double s_star) {
  positive(s_star, "s*");
  const double k = model.k;
  return (1.0 + k * (setup.S0 - setup.delta_max)) / (k * s_star * phi.increment(setup.Q));
}

ConvexityBound kappa_bound_convexity(const ExecutionSetup& setup, const IntensityModel& model, const PenaltySpec& phi,
                                     double expected_ST) {
  positive(expected_ST, "E[S_T]");
  ConvexityBound b;
  b.log_q_threshold = std::log(2.0 * setup.T) + model.log_eval(-setup.S0);
  b.q_threshold = checked_exp(b.log_q_threshold);
  b.kappa_ceiling = 2.0 / (model.k * expected_ST * phi.left_derivative(setup.Q));
  if (!phi.is_identity()) {
    if (setup.Q >= 2) {
      b.rho = rho_condition(phi, setup.Q, mu_max(setup, model));
    } else {
      b.rho = RhoVerdict{true, 0.0, 1.0};
    }
  }
  return b;
}

SharpIntegrands b2_integrands(const CostModel& p, const PricePath& path) {
  const LambdaTriple L = big_lambda(p.model, 0.0, path);
  const auto f = poisson::evaluate(L.value, p.setup.Q, p.penalty);
  const double x0 = path.initial();
  return {-p.setup.Q * f.p_gt_q + (x0 * L.d1 - L.value) * f.p_le_qm1, path.terminal() * L.d1 * f.phi};
}

double a_integrand(const CostModel& p, double delta, const PricePath& path) {
  const LambdaTriple L = big_lambda(p.model, delta, path);
  const int Q = p.setup.Q;
  const double a = path.initial() - delta;
  return (a * L.d2 - 2.0 * L.d1) * poisson::cdf(L.value, Q - 1) - a * L.d1 * L.d1 * poisson::pmf(L.value, Q - 1);
}

double b_integrand_general(const CostModel& p, double delta, const PricePath& path) {
  const LambdaTriple L = big_lambda(p.model, delta, path);
  const auto f = poisson::evaluate(L.value, p.setup.Q, p.penalty);
  return path.terminal() * (L.d2 * f.phi - L.d1 * L.d1 * f.psi);
}

double b_integrand_identity(const CostModel& p, double delta, const PricePath& path) {
  const LambdaTriple L = big_lambda(p.model, delta, path);
  const int Q = p.setup.Q;
  return path.terminal() * (L.d2 * poisson::cdf(L.value, Q - 1) - L.d1 * L.d1 * poisson::pmf(L.value, Q - 1));
}

SharpBounds sharp_bounds_mc(const CostModel& p, const PathSource& source, std::size_t M,
                            std::span<const double> delta_grid, Execution exec) {
  if (M < 100) throw DomainError("sharp_bounds_mc: M must be >= 100");
  require_paths(source, M);
  auto b_of = [&](double d, const PricePath& path) {
    return p.penalty.is_identity() ? b_integrand_identity(p, d, path) : b_integrand_general(p, d, path);
  };

  const auto b2_table = mc_tabulate(
      M, 2,
      [&](std::size_t i, std::span<double> out) {
        const auto v = b2_integrands(p, source.path(i));
        out[0] = v.b2_num;
        out[1] = v.b2_den;
      },
      exec);
  std::vector<double> num(M), den(M);
  for (std::size_t i = 0; i < M; ++i) {
    num[i] = b2_table[2 * i];
    den[i] = b2_table[2 * i + 1];
  }
  SharpBounds s;
  s.n_paths = M;
  {
    RunningStats a, b;
    for (std::size_t i = 0; i < M; ++i) {
      a.add(num[i]);
      b.add(den[i]);
    }
    s.b2 = a.mean / b.mean;
    s.b2_se = ratio_se(num, den);
  }

  const std::size_t nd = delta_grid.size();
  const auto stats = mc_accumulate(
      M, 2 * nd,
      [&](std::size_t i, std::span<double> out) {
        const PricePath path = source.path(i);
        for (std::size_t j = 0; j < nd; ++j) {
          out[2 * j] = a_integrand(p, delta_grid[j], path);
          out[2 * j + 1] = b_of(delta_grid[j], path);
        }
      },
      exec);
  s.deltas.assign(delta_grid.begin(), delta_grid.end());
  std::optional<std::size_t> arg;
  for (std::size_t j = 0; j < nd; ++j) {
    s.A.push_back(stats[2 * j].mean);
    s.A_se.push_back(stats[2 * j].std_error());
    s.B.push_back(stats[2 * j + 1].mean);
    s.B_se.push_back(stats[2 * j + 1].std_error());
    s.d_plus.push_back(s.B.back() > 0.0);
    if (s.d_plus.back()) {
      const double r = s.A.back() / s.B.back();
      if (!s.min_AB || r < *s.min_AB) {
        s.min_AB = r;
        arg = j;
      }
    }
  }
  if (arg) {
    const double d = delta_grid[*arg];
    const auto ab = mc_tabulate(
        M, 2,
        [&](std::size_t i, std::span<double> out) {
          const PricePath path = source.path(i);
          out[0] = a_integrand(p, d, path);
          out[1] = b_of(d, path);
        },
        exec);
    std::vector<double> av(M), bv(M);
    for (std::size_t i = 0; i < M; ++i) {
      av[i] = ab[2 * i];
      bv[i] = ab[2 * i + 1];
    }
    s.min_AB_se = ratio_se(av, bv);
  }
  return s;
}

bool CriteriaReport::convexity_ok(int Q) const {
  return std::log(static_cast<double>(Q)) >= convexity.log_q_threshold && kappa <= convexity.kappa_ceiling &&
         (!convexity.rho || convexity.rho->holds);
}

CriteriaReport check_criteria(const CostModel& p, double expected_ST, double s_star, std::optional<SharpBounds> sharp) {
  p.setup.validate();
  CriteriaReport r;
  r.structural = structural_check(p.setup, p.model);
  r.expected_ST = expected_ST;
  r.s_star = s_star;
  r.kappa = p.setup.kappa;
  r.kappa_origin_bound = kappa_bound_origin(p.setup, p.model, p.penalty, expected_ST);
  r.kappa_global_bound = kappa_bound_global(p.setup, p.model, p.penalty, s_star);
  r.convexity = kappa_bound_convexity(p.setup, p.model, p.penalty, expected_ST);
  r.sharp = std::move(sharp);
  return r;
}

void write_criteria_report(std::ostream& out, const CriteriaReport& r, int Q) {
  auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };
  out << "kappa = " << csv::format(r.kappa) << '\n';
  out << "expected_ST = " << csv::format(r.expected_ST) << '\n';
  out << "s_star = " << csv::format(r.s_star) << '\n';
  out << "structural.log_threshold = " << csv::format(r.structural.log_threshold) << '\n';
  out << "structural.threshold = " << csv::format(r.structural.threshold) << '\n';
  out << "structural.verdict = " << verdict(r.structural.ok) << '\n';
  out << "origin.kappa_bound = " << csv::format(r.kappa_origin_bound) << '\n';
  out << "origin.verdict = " << verdict(r.origin_ok()) << '\n';
  out << "global.kappa_bound = " << csv::format(r.kappa_global_bound) << '\n';
  out << "global.verdict = " << verdict(r.global_ok() && r.structural.ok) << '\n';
  out << "convexity.q_threshold = " << csv::format(r.convexity.q_threshold) << '\n';
  out << "convexity.kappa_ceiling = " << csv::format(r.convexity.kappa_ceiling) << '\n';
  if (r.convexity.rho) {
    out << "convexity.rho_star = " << csv::format(r.convexity.rho->rho_star) << '\n';
    out << "convexity.rho_ceiling = " << csv::format(r.convexity.rho->ceiling) << '\n';
    out << "convexity.rho_verdict = " << verdict(r.convexity.rho->holds) << '\n';
  } else {
    out << "convexity.rho_verdict = BYPASSED_IDENTITY\n";
  }
  out << "convexity.verdict = " << verdict(r.convexity_ok(Q)) << '\n';
  if (r.sharp) {
    const auto& s = *r.sharp;
    out << "sharp.n_paths = " << s.n_paths << '\n';
    out << "sharp.b2 = " << csv::format(s.b2) << '\n';
    out << "sharp.b2_se = " << csv::format(s.b2_se) << '\n';
    out << "sharp.origin_verdict = " << verdict(r.sharp_origin_ok()) << '\n';
    if (s.min_AB) {
      out << "sharp.min_AB = " << csv::format(*s.min_AB) << '\n';
      out << "sharp.min_AB_se = " << csv::format(s.min_AB_se) << '\n';
    } else {
      out << "sharp.min_AB = UNCONSTRAINED_EMPTY_D_PLUS\n";
    }
    out << "sharp.convexity_verdict = " << verdict(r.sharp_convexity_ok()) << '\n';
  }
}

}  // namespace limitpost
