#include "limitpost/penalty.hpp"

#include <cmath>
#include <string>

#include "limitpost/errors.hpp"

namespace limitpost {

PenaltySpec PenaltySpec::identity() { return PenaltySpec(PenaltyKind::identity, 0.0, 0.0); }

PenaltySpec PenaltySpec::exponential_impact(double a_prime, double k_prime) {
  if (!(a_prime >= 0.0) || !(k_prime >= 0.0) || !std::isfinite(a_prime) || !std::isfinite(k_prime)) {
    throw DomainError("penalty: A' and k' must be finite and non-negative");
  }
  PenaltySpec spec(PenaltyKind::exponential_impact, a_prime, k_prime);
  double prev = spec.eval_unchecked(0.0);
  double prev_inc = 0.0;
  for (int x = 1; x <= 256; ++x) {
    const double cur = spec.eval_unchecked(x);
    const double inc = cur - prev;
    if (!std::isfinite(cur)) break;
    if (inc < -1e-12 * std::abs(cur) || inc < prev_inc - 1e-9 * std::abs(cur)) {
      throw DomainError("penalty: not non-decreasing convex at x=" + std::to_string(x));
    }
    prev = cur;
    prev_inc = inc;
  }
  return spec;
}

double PenaltySpec::eval_unchecked(double x) const {
  if (kind_ == PenaltyKind::identity) return x;
  return (1.0 + a_prime_ * std::exp(k_prime_ * x)) * x;
}

double PenaltySpec::operator()(double x) const {
  if (!(x >= 0.0)) throw DomainError("penalty: argument must be non-negative");
  return eval_unchecked(x);
}

double PenaltySpec::increment(int q) const {
  if (q < 1) throw DomainError("penalty increment: q must be >= 1");
  if (kind_ == PenaltyKind::identity) return 1.0;
  return eval_unchecked(q) - eval_unchecked(q - 1);
}

double PenaltySpec::left_derivative(int q) const {
  if (q < 1) throw DomainError("penalty derivative: q must be >= 1");
  if (kind_ == PenaltyKind::identity) return 1.0;
  const double kq = k_prime_ * q;
  return 1.0 + a_prime_ * std::exp(kq) * (1.0 + kq);
}

}  // namespace limitpost
