#pragma once

namespace limitpost {

enum class PenaltyKind { identity, exponential_impact };

// Phi(x) = (1 + A' e^{k' x}) x, or Phi(x) = x.
class PenaltySpec {
 public:
  static PenaltySpec identity();
  // Throws DomainError for negative parameters or a grid convexity failure.
  static PenaltySpec exponential_impact(double a_prime, double k_prime);

  PenaltyKind kind() const noexcept { return kind_; }
  bool is_identity() const noexcept { return kind_ == PenaltyKind::identity; }
  double a_prime() const noexcept { return a_prime_; }
  double k_prime() const noexcept { return k_prime_; }

  double operator()(double x) const;  // x >= 0
  // Phi(q) - Phi(q-1).
  double increment(int q) const;
  // Left derivative at integer q >= 1.
  double left_derivative(int q) const;

 private:
  PenaltySpec(PenaltyKind kind, double a, double k) : kind_(kind), a_prime_(a), k_prime_(k) {}
  double eval_unchecked(double x) const;

  PenaltyKind kind_;
  double a_prime_;
  double k_prime_;
};

inline double penalty_eval(const PenaltySpec& phi, double x) { return phi(x); }
inline double penalty_left_derivative(const PenaltySpec& phi, int q) { return phi.left_derivative(q); }

}  // namespace limitpost
