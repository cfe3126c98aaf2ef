#pragma once

#include <functional>

#include "limitpost/penalty.hpp"

// Functionals of N ~ Poisson(mu). Every expectation whose integrand vanishes
// above q is an exact finite sum.
namespace limitpost::poisson {

struct SeriesCutoff {
  int max_terms = 10000;
  double tail_tolerance = 1e-15;
  void validate() const;
};

struct TruncatedSum {
  double value;
  double tail_bound;
  int terms;
};

double pmf(double mu, int k);
double log_pmf(double mu, int k);
double cdf(double mu, int k);  // k < 0 gives 0
double sf(double mu, int k);   // P(N > k)

double expected_min(double mu, int q);        // E[q ^ N]
double expected_shortfall(double mu, int q);  // E[(q - N)+]
double expected_penalty(double mu, int q, const PenaltySpec& phi);  // E[Phi((q - N)+)]

double phi_mu(double mu, int q, const PenaltySpec& phi);
double psi_mu(double mu, int q, const PenaltySpec& phi);
double theta(double mu, int q, const PenaltySpec& phi);

// pmf(mu, q-1) / cdf(mu, q-1), evaluated without underflow.
double hazard_ratio(double mu, int q);

// E[f(N)] for f bounded by `bound` in absolute value; throws if the tail
// mass cannot be pushed below cutoff.tail_tolerance within max_terms.
TruncatedSum truncated_expectation(double mu, const std::function<double(int)>& f, double bound,
                                   const SeriesCutoff& cutoff);

// Everything the cost integrands need, computed in one pass over j = 0..q.
struct Functionals {
  double p_le_qm1 = 0;  // P(N <= q-1)
  double p_gt_q = 0;    // P(N > q)
  double p_eq_qm1 = 0;  // P(N = q-1)
  double e_penalty = 0; // E[Phi((q-N)+)]
  double phi = 0;
  double psi = 0;
};

Functionals evaluate(double mu, int q, const PenaltySpec& phi);

}  // namespace limitpost::poisson
