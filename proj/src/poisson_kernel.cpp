#include "limitpost/poisson_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "limitpost/errors.hpp"

namespace limitpost::poisson {
namespace {

constexpr double kProductLimit = 700.0;  // e^{-mu} stays a normal double below this

void check_mu(double mu) {
  if (!(mu >= 0.0)) throw DomainError("poisson: mu must be >= 0");
}

void check_q(int q) {
  if (q < 1) throw DomainError("poisson: q must be >= 1");
}

// masses[j] = pmf(mu, j), j = 0..n. Product recurrence from e^{-mu} when that
// is representable, otherwise anchored at the mode in log space.
const std::vector<double>& masses(double mu, int n) {
  thread_local std::vector<double> buf;
  buf.assign(static_cast<std::size_t>(n) + 1, 0.0);
  if (mu == 0.0) {
    buf[0] = 1.0;
    return buf;
  }
  if (!std::isfinite(mu)) return buf;
  if (mu <= kProductLimit) {
    double p = std::exp(-mu);
    buf[0] = p;
    for (int j = 1; j <= n; ++j) {
      p *= mu / j;
      buf[j] = p;
    }
    return buf;
  }
  const int j0 = static_cast<int>(std::min<double>(n, std::floor(mu)));
  buf[j0] = std::exp(log_pmf(mu, j0));
  for (int j = j0; j > 0; --j) buf[j - 1] = buf[j] * (j / mu);
  for (int j = j0; j < n; ++j) buf[j + 1] = buf[j] * (mu / (j + 1));
  return buf;
}

// Sum_{j > k} pmf(mu, j) by forward recurrence; used when cdf(k) ~ 1.
double upper_tail(double mu, int k, double pmf_k) {
  double term = pmf_k;
  double sum = 0.0;
  for (int j = k + 1;; ++j) {
    term *= mu / j;
    sum += term;
    if (j > mu && term <= 1e-18 * sum) break;
    if (term == 0.0) break;
  }
  return sum;
}

// Scaled conditional weights w_j = pmf(j)/pmf(q-1), j = 0..q-1; stable for mu > q-1.
const std::vector<double>& scaled_weights(double mu, int q) {
  thread_local std::vector<double> w;
  w.assign(static_cast<std::size_t>(q), 0.0);
  w[q - 1] = 1.0;
  for (int j = q - 1; j > 0; --j) w[j - 1] = w[j] * (j / mu);
  return w;
}

}  // namespace

void SeriesCutoff::validate() const {
  if (max_terms < 1) throw DomainError("SeriesCutoff: max_terms must be >= 1");
  if (!(tail_tolerance >= 0.0)) throw DomainError("SeriesCutoff: tail_tolerance must be >= 0");
}

double log_pmf(double mu, int k) {
  check_mu(mu);
  if (k < 0) throw DomainError("poisson pmf: k must be >= 0");
  if (mu == 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return k * std::log(mu) - mu - std::lgamma(k + 1.0);
}

double pmf(double mu, int k) {
  check_mu(mu);
  if (k < 0) throw DomainError("poisson pmf: k must be >= 0");
  if (mu == 0.0) return k == 0 ? 1.0 : 0.0;
  if (mu <= kProductLimit && k <= 4096) return masses(mu, k)[k];
  return std::exp(log_pmf(mu, k));
}

double cdf(double mu, int k) {
  check_mu(mu);
  if (k < 0) return 0.0;
  const auto& m = masses(mu, k);
  double s = 0.0;
  for (double v : m) s += v;
  return std::min(s, 1.0);
}

double sf(double mu, int k) {
  check_mu(mu);
  if (k < 0) return 1.0;
  const auto& m = masses(mu, k);
  double s = 0.0;
  for (double v : m) s += v;
  if (s > 1.0 - 1e-12) return upper_tail(mu, k, m[k]);
  return 1.0 - s;
}

double expected_min(double mu, int q) {
  check_mu(mu);
  check_q(q);
  return q * sf(mu, q) + mu * cdf(mu, q - 1);
}

double expected_shortfall(double mu, int q) {
  check_mu(mu);
  check_q(q);
  const auto& m = masses(mu, q);
  double s = 0.0;
  for (int j = 0; j < q; ++j) s += (q - j) * m[j];
  return s;
}

Functionals evaluate(double mu, int q, const PenaltySpec& phi) {
  check_mu(mu);
  check_q(q);
  thread_local std::vector<double> pen;
  pen.resize(static_cast<std::size_t>(q) + 1);
  for (int x = 0; x <= q; ++x) pen[x] = phi.is_identity() ? double(x) : phi(x);

  const auto& m = masses(mu, q);
  Functionals f;
  double cdf_qm1 = 0.0;
  for (int j = 0; j < q; ++j) {
    const double w = m[j];
    cdf_qm1 += w;
    const int r = q - j;  // >= 1
    f.e_penalty += pen[r] * w;
    f.phi += (pen[r] - pen[r - 1]) * w;
    const double lower = r >= 2 ? pen[r - 2] : 0.0;
    f.psi += (lower - 2.0 * pen[r - 1] + pen[r]) * w;
  }
  const double cdf_q = cdf_qm1 + m[q];
  f.p_le_qm1 = std::min(cdf_qm1, 1.0);
  f.p_eq_qm1 = m[q - 1];
  f.p_gt_q = cdf_q > 1.0 - 1e-12 ? upper_tail(mu, q, m[q]) : 1.0 - cdf_q;
  return f;
}

double expected_penalty(double mu, int q, const PenaltySpec& phi) { return evaluate(mu, q, phi).e_penalty; }
double phi_mu(double mu, int q, const PenaltySpec& phi) { return evaluate(mu, q, phi).phi; }
double psi_mu(double mu, int q, const PenaltySpec& phi) { return evaluate(mu, q, phi).psi; }

double theta(double mu, int q, const PenaltySpec& phi) {
  check_mu(mu);
  check_q(q);
  if (!std::isfinite(mu)) throw DegenerateConditioning("theta: conditioning on N <= q-1 at infinite mu");
  if (mu == 0.0) return phi.increment(q);
  if (mu <= q - 1) {
    const Functionals f = evaluate(mu, q, phi);
    if (!(f.p_le_qm1 > 0.0)) throw DegenerateConditioning("theta: P(N <= q-1) underflowed");
    return f.phi / f.p_le_qm1;
  }
  const auto& w = scaled_weights(mu, q);
  double num = 0.0, den = 0.0;
  for (int j = 0; j < q; ++j) {
    num += phi.increment(q - j) * w[j];
    den += w[j];
  }
  if (!(den > 0.0) || !std::isfinite(den)) throw DegenerateConditioning("theta: degenerate weights");
  return num / den;
}

double hazard_ratio(double mu, int q) {
  check_mu(mu);
  check_q(q);
  if (!std::isfinite(mu)) return 1.0;
  if (mu <= q - 1) {
    const auto& m = masses(mu, q - 1);
    double s = 0.0;
    for (double v : m) s += v;
    return m[q - 1] / s;
  }
  const auto& w = scaled_weights(mu, q);
  double den = 0.0;
  for (double v : w) den += v;
  return 1.0 / den;
}

TruncatedSum truncated_expectation(double mu, const std::function<double(int)>& f, double bound,
                                   const SeriesCutoff& cutoff) {
  check_mu(mu);
  cutoff.validate();
  TruncatedSum out{0.0, 1.0, 0};
  double mass = 0.0;
  for (int j = 0; j < cutoff.max_terms; ++j) {
    const double p = pmf(mu, j);
    out.value += f(j) * p;
    mass += p;
    out.terms = j + 1;
    // Past the mode the remaining mass is dominated by a geometric series.
    double tail = std::max(0.0, 1.0 - mass);
    if (j + 2 > mu) {
      const double next = p * mu / (j + 1);
      tail = std::min(tail, next / (1.0 - mu / (j + 2)));
    }
    out.tail_bound = bound * tail;
    if (j + 1 > mu && out.tail_bound <= cutoff.tail_tolerance) return out;
  }
  throw NumericFault("truncated_expectation: tail bound above tolerance after max_terms");
}

}  // namespace limitpost::poisson
