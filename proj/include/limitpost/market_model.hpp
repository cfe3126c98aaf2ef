#pragma once

#include <cmath>
#include <filesystem>
#include <istream>
#include <span>
#include <vector>

#include "limitpost/penalty.hpp"
#include "limitpost/price_path.hpp"

namespace limitpost {

// lambda(x) = A e^{-k x}, extended to all of R.
struct IntensityModel {
  double A = 1.0;
  double k = 1.0;

  IntensityModel() = default;
  IntensityModel(double a, double k_);  // throws DomainError unless A, k > 0

  double operator()(double x) const;
  double log_eval(double x) const { return std::log(A) - k * x; }
};

struct ExecutionSetup {
  int Q = 1;
  double T = 1.0;
  double kappa = 1.0;
  double delta_max = 1.0;
  double S0 = 100.0;

  void validate() const;  // throws DomainError
};

struct LambdaTriple {
  double value;  // Lambda_T(delta, S)
  double d1;     // d/d delta
  double d2;     // d^2/d delta^2
};

inline double lambda_eval(const IntensityModel& m, double x) { return m(x); }

// Lambda_T(delta, S) with S_0 taken as the path's first sample.
LambdaTriple big_lambda(const IntensityModel& model, double delta, const PricePath& path);

struct RhoVerdict {
  bool holds = false;
  double rho_star = 0.0;  // max_x (Phi(x)-Phi(x-1)) / (Phi(x+1)-Phi(x))
  double ceiling = 0.0;   // 1 - pmf(mu_max, q-1)/cdf(mu_max, q-1)
};

RhoVerdict rho_condition(const PenaltySpec& phi, int q, double mu_max);

// mu_max = T lambda(-S0), clamped to +inf on overflow.
double mu_max(const ExecutionSetup& setup, const IntensityModel& model);

struct CalibrationPoint {
  double distance;
  double rate;
};

// Ordinary least squares of ln(rate) on distance.
IntensityModel calibrate_intensity(std::span<const CalibrationPoint> points);

std::vector<CalibrationPoint> parse_calibration_points(std::istream& in);
std::vector<CalibrationPoint> load_calibration_points(const std::filesystem::path& file);

}  // namespace limitpost
