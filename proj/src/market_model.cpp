#include "limitpost/market_model.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "limitpost/csv.hpp"
#include "limitpost/errors.hpp"
#include "limitpost/poisson_kernel.hpp"

namespace limitpost {

IntensityModel::IntensityModel(double a, double k_) : A(a), k(k_) {
  if (!(A > 0.0) || !(k > 0.0) || !std::isfinite(A) || !std::isfinite(k)) {
    throw DomainError("intensity: A and k must be finite and positive");
  }
}

double IntensityModel::operator()(double x) const { return A * std::exp(-k * x); }

void ExecutionSetup::validate() const {
  if (Q < 1) throw DomainError("setup: Q must be >= 1");
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("setup: T must be positive");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("setup: kappa must be positive");
  if (!(S0 > 0.0) || !std::isfinite(S0)) throw DomainError("setup: S0 must be positive");
  if (!(delta_max > 0.0) || !(delta_max < S0)) throw DomainError("setup: need 0 < delta_max < S0");
}

LambdaTriple big_lambda(const IntensityModel& model, double delta, const PricePath& path) {
  const std::size_t n = path.values.size();
  if (n < 2 || path.times.size() != n) throw DomainError("big_lambda: path needs >= 2 samples");
  const double s0 = path.values[0];
  const double k = model.k;
  double sum = 0.0;
  switch (path.rule) {
    case Quadrature::left:
      for (std::size_t i = 0; i + 1 < n; ++i) {
        sum += (path.times[i + 1] - path.times[i]) * std::exp(-k * (path.values[i] - s0 + delta));
      }
      break;
    case Quadrature::right:
      for (std::size_t i = 1; i < n; ++i) {
        sum += (path.times[i] - path.times[i - 1]) * std::exp(-k * (path.values[i] - s0 + delta));
      }
      break;
    case Quadrature::inclusive: {
      const double w = path.times.back() / static_cast<double>(n - 1);
      for (std::size_t i = 0; i < n; ++i) sum += w * std::exp(-k * (path.values[i] - s0 + delta));
      break;
    }
  }
  const double value = model.A * sum;
  return {value, -k * value, k * k * value};
}

double mu_max(const ExecutionSetup& setup, const IntensityModel& model) {
  const double log_mu = std::log(setup.T) + model.log_eval(-setup.S0);
  if (log_mu > std::log(std::numeric_limits<double>::max())) return std::numeric_limits<double>::infinity();
  return std::exp(log_mu);
}

RhoVerdict rho_condition(const PenaltySpec& phi, int q, double mu_max_value) {
  if (q < 2) throw DomainError("rho_condition: q must be >= 2");
  if (!(mu_max_value >= 0.0)) throw DomainError("rho_condition: mu_max must be >= 0");
  RhoVerdict v;
  for (int x = 1; x <= q - 1; ++x) {
    const double r = phi.increment(x) / phi.increment(x + 1);
    v.rho_star = std::max(v.rho_star, r);
  }
  v.ceiling = 1.0 - poisson::hazard_ratio(mu_max_value, q);
  v.holds = v.rho_star < v.ceiling;
  return v;
}

IntensityModel calibrate_intensity(std::span<const CalibrationPoint> points) {
  if (points.size() < 2) throw DomainError("calibration: need at least two points");
  double sx = 0.0, sy = 0.0;
  for (const auto& p : points) {
    if (!(p.rate > 0.0) || !std::isfinite(p.rate) || !std::isfinite(p.distance)) {
      throw DomainError("calibration: rates must be positive and finite");
    }
    sx += p.distance;
    sy += std::log(p.rate);
  }
  const double n = static_cast<double>(points.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double dx = p.distance - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(p.rate) - my);
  }
  if (!(sxx > 0.0)) throw DomainError("calibration: distances must not all coincide");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  if (!(-slope > 0.0)) throw CalibrationError("calibration: fitted decay k <= 0");
  return IntensityModel(std::exp(intercept), -slope);
}

std::vector<CalibrationPoint> parse_calibration_points(std::istream& in) {
  const auto table = csv::read_numeric(in, {"distance", "rate"});
  std::vector<CalibrationPoint> out;
  out.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    if (!(r[1] > 0.0)) throw ValidationError("calibration: non-positive rate on line " + std::to_string(table.lines[i]));
    out.push_back({r[0], r[1]});
  }
  return out;
}

std::vector<CalibrationPoint> load_calibration_points(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open calibration file " + file.string());
  return parse_calibration_points(in);
}

}  // namespace limitpost
