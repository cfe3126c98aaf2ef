#pragma once

#include <cstddef>
#include <vector>

namespace limitpost {

// How the time integral of lambda along a sampled path is discretized.
//   left:      sum_{i<m} (t_{i+1}-t_i) f(S_i)   (exact for the step path)
//   right:     sum_{i>=1} (t_i-t_{i-1}) f(S_i)  (tick-data cycles)
//   inclusive: (T/m) sum_{i=0..m} f(S_i)        (uniform grids only)
enum class Quadrature { left, right, inclusive };

struct PricePath {
  std::vector<double> times;   // times[0] == 0, non-decreasing, positive span
  std::vector<double> values;  // finite, same length >= 2
  Quadrature rule = Quadrature::left;

  std::size_t size() const noexcept { return values.size(); }
  double initial() const { return values.front(); }
  double terminal() const { return values.back(); }
  double horizon() const { return times.back(); }

  // Throws DomainError when an invariant is broken.
  void validate() const;

  static PricePath uniform(std::vector<double> values, double T, Quadrature rule = Quadrature::left);
  static PricePath constant(double value, double T, int m);
};

}  // namespace limitpost
