#pragma once
// Independent reference evaluations for the tests. Nothing here calls the
// library's Poisson kernel; sums run in long double from the recurrence
// p_0 = e^{-mu}, p_j = p_{j-1} mu / j.
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline std::vector<long double> pmf_table(long double mu, int terms) {
  std::vector<long double> p(static_cast<std::size_t>(terms) + 1);
  p[0] = std::exp(-mu);
  for (int j = 1; j <= terms; ++j) p[j] = p[j - 1] * mu / j;
  return p;
}

inline long double series(long double mu, int terms, const std::function<long double(int)>& f) {
  auto p = pmf_table(mu, terms);
  long double s = 0.0L;
  for (int j = 0; j <= terms; ++j) s += f(j) * p[j];
  return s;
}

inline long double cdf(long double mu, int k) {
  if (k < 0) return 0.0L;
  return series(mu, k, [](int) { return 1.0L; });
}

// Phi(x) = (1 + a e^{k x}) x; a = 0 gives the identity.
struct Penalty {
  long double a = 0.0L;
  long double k = 0.0L;
  long double operator()(long double x) const { return x <= 0 ? 0.0L : (1.0L + a * std::exp(k * x)) * x; }
};

inline long double expected_min(long double mu, int q) {
  return series(mu, 400, [q](int j) { return static_cast<long double>(std::min(q, j)); });
}

inline long double expected_penalty(long double mu, int q, const Penalty& phi) {
  return series(mu, q, [&](int j) { return phi(q - j); });
}

inline long double phi_mu(long double mu, int q, const Penalty& phi) {
  return series(mu, q - 1, [&](int j) { return phi(q - j) - phi(q - j - 1); });
}

inline long double psi_mu(long double mu, int q, const Penalty& phi) {
  return series(mu, q, [&](int j) { return phi(q - j - 2) - 2 * phi(q - j - 1) + phi(q - j); });
}

// Constant path S = s0 over [0, T] with exponential intensity A e^{-k x}:
// Lambda(delta) = A T e^{-k delta}.
struct ConstantPathProblem {
  long double A, k, T, s0, kappa;
  int Q;
  Penalty phi;

  long double Lambda(long double d) const { return A * T * std::exp(-k * d); }

  long double cost(long double d) const {
    const long double mu = Lambda(d);
    return (s0 - d) * expected_min(mu, Q) + kappa * s0 * expected_penalty(mu, Q, phi);
  }

  // Derivative of cost by the chain rule through mu, computed from the
  // brute-force sums rather than the closed representation.
  long double derivative(long double d) const {
    const long double mu = Lambda(d);
    const long double dmu = -k * mu;
    // d/dmu E[min(Q,N)] = P(N <= Q-1); d/dmu E[Phi((Q-N)+)] = -phi_mu.
    return -expected_min(mu, Q) + (s0 - d) * dmu * cdf(mu, Q - 1) - kappa * s0 * dmu * phi_mu(mu, Q, phi);
  }

  // Golden-section search on [lo, hi] for a unimodal cost.
  long double argmin(long double lo, long double hi, long double tol = 1e-12L) const {
    const long double g = (std::sqrt(5.0L) - 1.0L) / 2.0L;
    long double a = lo, b = hi;
    long double c = b - g * (b - a), e = a + g * (b - a);
    long double fc = cost(c), fe = cost(e);
    while (b - a > tol) {
      if (fc < fe) {
        b = e; e = c; fe = fc;
        c = b - g * (b - a); fc = cost(c);
      } else {
        a = c; c = e; fc = fe;
        e = a + g * (b - a); fe = cost(e);
      }
    }
    return 0.5L * (a + b);
  }
};

}  // namespace oracle
