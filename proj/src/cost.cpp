#include "limitpost/cost.hpp"

#include <cmath>
#include <string>

#include "limitpost/csv.hpp"
#include "limitpost/errors.hpp"
#include "limitpost/poisson_kernel.hpp"

namespace limitpost {
namespace {

void check_delta(const CostModel& p, double delta) {
  if (!(delta >= 0.0 && delta <= p.setup.delta_max)) {
    throw DomainError("delta " + csv::format(delta) + " outside [0, delta_max]");
  }
}

double h_from(const CostModel& p, double delta, const LambdaTriple& L, double x0, double xT,
              const poisson::Functionals& f) {
  const double Q = p.setup.Q;
  return -Q * f.p_gt_q + (L.d1 * (x0 - delta) - L.value) * f.p_le_qm1 - p.setup.kappa * xT * L.d1 * f.phi;
}

double second_from(const CostModel& p, double delta, const LambdaTriple& L, double x0, double xT,
                   const poisson::Functionals& f) {
  const double a = x0 - delta;
  const double kx = p.setup.kappa * xT;
  return (a * L.d2 - 2.0 * L.d1) * f.p_le_qm1 - kx * L.d2 * f.phi - a * L.d1 * L.d1 * f.p_eq_qm1 +
         kx * L.d1 * L.d1 * f.psi;
}

double cost_from(const CostModel& p, double delta, double mu, double x0, double xT, const poisson::Functionals& f) {
  const double expected_fill = p.setup.Q * f.p_gt_q + mu * f.p_le_qm1;
  return (x0 - delta) * expected_fill + p.setup.kappa * xT * f.e_penalty;
}

}  // namespace

double cost_tilde(const CostModel& p, double delta, double Lambda, double x0, double xT) {
  check_delta(p, delta);
  if (!(Lambda >= 0.0)) throw DomainError("cost_tilde: Lambda must be >= 0");
  return cost_from(p, delta, Lambda, x0, xT, poisson::evaluate(Lambda, p.setup.Q, p.penalty));
}

double h_general(const CostModel& p, double delta, const LambdaTriple& L, double x0, double xT) {
  check_delta(p, delta);
  return h_from(p, delta, L, x0, xT, poisson::evaluate(L.value, p.setup.Q, p.penalty));
}

double h_identity(const CostModel& p, double delta, const LambdaTriple& L, double x0, double xT) {
  check_delta(p, delta);
  const int Q = p.setup.Q;
  const double le = poisson::cdf(L.value, Q - 1);
  const double gt = poisson::sf(L.value, Q);
  return -Q * gt + ((x0 - delta - p.setup.kappa * xT) * L.d1 - L.value) * le;
}

double c_second_general(const CostModel& p, double delta, const LambdaTriple& L, double x0, double xT) {
  check_delta(p, delta);
  return second_from(p, delta, L, x0, xT, poisson::evaluate(L.value, p.setup.Q, p.penalty));
}

double c_second_identity(const CostModel& p, double delta, const LambdaTriple& L, double x0, double xT) {
  check_delta(p, delta);
  const int Q = p.setup.Q;
  const double le = poisson::cdf(L.value, Q - 1);
  const double eq = poisson::pmf(L.value, Q - 1);
  const double a = x0 - delta - p.setup.kappa * xT;
  return (a * L.d2 - 2.0 * L.d1) * le - a * L.d1 * L.d1 * eq;
}

double h_func(const CostModel& p, double delta, const PricePath& path) {
  const LambdaTriple L = big_lambda(p.model, delta, path);
  return p.penalty.is_identity() ? h_identity(p, delta, L, path.initial(), path.terminal())
                                 : h_general(p, delta, L, path.initial(), path.terminal());
}

double c_second_integrand(const CostModel& p, double delta, const PricePath& path) {
  const LambdaTriple L = big_lambda(p.model, delta, path);
  return p.penalty.is_identity() ? c_second_identity(p, delta, L, path.initial(), path.terminal())
                                 : c_second_general(p, delta, L, path.initial(), path.terminal());
}

Integrands evaluate_path(const CostModel& p, double delta, const PricePath& path) {
  check_delta(p, delta);
  const LambdaTriple L = big_lambda(p.model, delta, path);
  const double x0 = path.initial(), xT = path.terminal();
  const auto f = poisson::evaluate(L.value, p.setup.Q, p.penalty);
  return {cost_from(p, delta, L.value, x0, xT, f), h_from(p, delta, L, x0, xT, f),
          second_from(p, delta, L, x0, xT, f)};
}

void require_paths(const PathSource& source, std::size_t M) {
  const auto n = source.size();
  if (n && *n < M) {
    throw SourceExhausted("truncated sample: source holds " + std::to_string(*n) + " paths, " + std::to_string(M) +
                          " requested");
  }
}

CostCurve mc_cost_curve(const CostModel& p, std::span<const double> deltas, const PathSource& source, std::size_t M,
                        Execution exec) {
  p.setup.validate();
  if (M < 2) throw DomainError("mc_cost_curve: M must be >= 2");
  if (deltas.empty()) throw DomainError("mc_cost_curve: empty grid");
  for (double d : deltas) check_delta(p, d);
  require_paths(source, M);
  const std::size_t nd = deltas.size();
  const auto stats = mc_accumulate(
      M, 3 * nd,
      [&](std::size_t i, std::span<double> out) {
        const PricePath path = source.path(i);
        for (std::size_t j = 0; j < nd; ++j) {
          const Integrands v = evaluate_path(p, deltas[j], path);
          if (!std::isfinite(v.cost) || !std::isfinite(v.grad) || !std::isfinite(v.second)) {
            throw NumericFault("mc_cost_curve: non-finite integrand on path " + std::to_string(i) + " at delta " +
                               csv::format(deltas[j]));
          }
          out[3 * j] = v.cost;
          out[3 * j + 1] = v.grad;
          out[3 * j + 2] = v.second;
        }
      },
      exec);
  CostCurve curve;
  curve.deltas.assign(deltas.begin(), deltas.end());
  curve.n_paths = M;
  for (std::size_t j = 0; j < nd; ++j) {
    curve.c.push_back(stats[3 * j].mean);
    curve.c_se.push_back(stats[3 * j].std_error());
    curve.cp.push_back(stats[3 * j + 1].mean);
    curve.cp_se.push_back(stats[3 * j + 1].std_error());
    curve.cpp.push_back(stats[3 * j + 2].mean);
    curve.cpp_se.push_back(stats[3 * j + 2].std_error());
  }
  return curve;
}

GridMin grid_argmin(const CostCurve& curve) {
  if (curve.c.empty()) throw DomainError("grid_argmin: empty curve");
  std::size_t best = 0;
  for (std::size_t j = 1; j < curve.c.size(); ++j) {
    if (curve.c[j] < curve.c[best]) best = j;
  }
  return {curve.deltas[best], curve.c[best], best};
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  if (n == 0) throw DomainError("uniform_grid: n must be >= 1");
  if (n == 1) return {lo};
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  g.back() = hi;
  return g;
}

void write_cost_curve_csv(std::ostream& out, const CostCurve& curve) {
  csv::write_header(out, {"delta", "c", "c_se", "cp", "cp_se", "cpp", "cpp_se"});
  for (std::size_t j = 0; j < curve.deltas.size(); ++j) {
    csv::write_row(out, {curve.deltas[j], curve.c[j], curve.c_se[j], curve.cp[j], curve.cp_se[j], curve.cpp[j],
                         curve.cpp_se[j]});
  }
}

std::size_t FiniteDifferenceCheck::first_order_agreements(double z) const {
  std::size_t ok = 0;
  for (std::size_t j = 0; j < deltas.size(); ++j) {
    ok += std::abs(fd1[j] - cp[j]) <= z * std::hypot(fd1_se[j], cp_se[j]);
  }
  return ok;
}

std::size_t FiniteDifferenceCheck::second_order_agreements(double z) const {
  std::size_t ok = 0;
  for (std::size_t j = 0; j < deltas.size(); ++j) {
    ok += std::abs(fd2[j] - cpp[j]) <= z * std::hypot(fd2_se[j], cpp_se[j]);
  }
  return ok;
}

FiniteDifferenceCheck mc_finite_difference_check(const CostModel& p, std::span<const double> deltas, double h,
                                                 const PathSource& source, std::size_t M, Execution exec) {
  if (!(h > 0.0)) throw DomainError("finite difference: h must be positive");
  for (double d : deltas) {
    check_delta(p, d - h);
    check_delta(p, d + h);
  }
  require_paths(source, M);
  const std::size_t nd = deltas.size();
  const auto stats = mc_accumulate(
      M, 4 * nd,
      [&](std::size_t i, std::span<double> out) {
        const PricePath path = source.path(i);
        for (std::size_t j = 0; j < nd; ++j) {
          const double d = deltas[j];
          const Integrands mid = evaluate_path(p, d, path);
          const double lo = evaluate_path(p, d - h, path).cost;
          const double hi = evaluate_path(p, d + h, path).cost;
          out[4 * j] = (hi - lo) / (2.0 * h);
          out[4 * j + 1] = mid.grad;
          out[4 * j + 2] = (hi - 2.0 * mid.cost + lo) / (h * h);
          out[4 * j + 3] = mid.second;
        }
      },
      exec);
  FiniteDifferenceCheck r;
  r.deltas.assign(deltas.begin(), deltas.end());
  r.h = h;
  r.n_paths = M;
  for (std::size_t j = 0; j < nd; ++j) {
    r.fd1.push_back(stats[4 * j].mean);
    r.fd1_se.push_back(stats[4 * j].std_error());
    r.cp.push_back(stats[4 * j + 1].mean);
    r.cp_se.push_back(stats[4 * j + 1].std_error());
    r.fd2.push_back(stats[4 * j + 2].mean);
    r.fd2_se.push_back(stats[4 * j + 2].std_error());
    r.cpp.push_back(stats[4 * j + 3].mean);
    r.cpp_se.push_back(stats[4 * j + 3].std_error());
  }
  return r;
}

}  // namespace limitpost
