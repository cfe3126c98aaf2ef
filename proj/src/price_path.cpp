#include "limitpost/price_path.hpp"

#include <cmath>

#include "limitpost/errors.hpp"

namespace limitpost {

void PricePath::validate() const {
  if (values.size() < 2 || times.size() != values.size()) {
    throw DomainError("path: need matching times/values with at least two samples");
  }
  if (times[0] != 0.0) throw DomainError("path: times must start at 0");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || !std::isfinite(times[i])) throw DomainError("path: non-finite sample");
    if (i > 0 && times[i] < times[i - 1]) throw DomainError("path: times must be non-decreasing");
  }
  if (!(times.back() > 0.0)) throw DomainError("path: time span must be positive");
}

PricePath PricePath::uniform(std::vector<double> vals, double T, Quadrature rule) {
  if (vals.size() < 2) throw DomainError("path: need at least two samples");
  if (!(T > 0.0)) throw DomainError("path: horizon must be positive");
  const std::size_t m = vals.size() - 1;
  PricePath p;
  p.times.resize(vals.size());
  for (std::size_t i = 0; i <= m; ++i) p.times[i] = T * static_cast<double>(i) / static_cast<double>(m);
  p.times[m] = T;
  p.values = std::move(vals);
  p.rule = rule;
  return p;
}

PricePath PricePath::constant(double value, double T, int m) {
  if (m < 1) throw DomainError("path: m must be >= 1");
  return uniform(std::vector<double>(static_cast<std::size_t>(m) + 1, value), T);
}

}  // namespace limitpost
