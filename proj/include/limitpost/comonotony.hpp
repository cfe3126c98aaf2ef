#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "limitpost/cost.hpp"
#include "limitpost/price_paths.hpp"

namespace limitpost {

enum class Monotony { non_decreasing, non_increasing };

struct MonotoneFunctional {
  std::string name;
  std::function<double(const PricePath&)> eval;
  Monotony monotony = Monotony::non_decreasing;
  double growth_exponent = 1.0;
};

namespace functionals {
MonotoneFunctional terminal();
MonotoneFunctional running_max();
MonotoneFunctional running_min();
MonotoneFunctional time_mean();
// Lambda_T(0, .) with the reference price fixed at s_ref; non-increasing.
MonotoneFunctional lambda_at_zero(const IntensityModel& model, double s_ref);
MonotoneFunctional negated(const MonotoneFunctional& f);
}  // namespace functionals

// Checks the declared monotony on `pairs` dominated pairs (alpha, alpha + bump)
// with alpha drawn from the source and non-negative random bumps.
bool audit_monotony(const MonotoneFunctional& f, const PathSource& source, std::size_t pairs = 100,
                    std::uint64_t seed = 0);

struct CovarianceEstimate {
  double cov = 0.0;
  double se = 0.0;  // delete-one jackknife
  std::size_t M = 0;
  bool same_monotony = true;
  // Sign expected by the co-monotony principle: >= 0 for same monotony.
  bool consistent(double z = 3.0) const { return same_monotony ? cov >= -z * se : cov <= z * se; }
};

CovarianceEstimate estimate_covariance(const MonotoneFunctional& F, const MonotoneFunctional& G,
                                       const PathSource& source, std::size_t M, Execution exec = Execution::parallel);

// Unbiased sample covariance with its delete-one jackknife standard error.
CovarianceEstimate covariance_with_jackknife(std::span<const double> x, std::span<const double> y);

struct PathwiseMonotony {
  std::vector<bool> monotone;  // per path: H non-decreasing on the grid
  double pass_rate = 0.0;
};

PathwiseMonotony check_pathwise_H_monotone(const CostModel& p, std::span<const double> delta_grid,
                                           const std::vector<PricePath>& paths, double tolerance = 0.0);

// L(t, x) = int_{x1}^x d xi / sigma(t, xi) by adaptive Simpson.
double lamperti_transform(const DiffusionSpec& spec, double x1, double x, double t = 0.0);
// Inverse of L(t, .) by bisection; throws DomainError when y is outside L(t, I).
double lamperti_inverse(const DiffusionSpec& spec, double x1, double y, double t = 0.0);
// beta(t, y) = (b/sigma - int_{x1}^x sigma_t/sigma^2 - sigma_x/2)(t, L^{-1}(t, y)).
double lamperti_beta(const DiffusionSpec& spec, double x1, double y, double t = 0.0);

struct EndpointDivergence {
  double endpoint;
  bool diverges;         // heuristic
  double last_increment;
  double increment_ratio;  // last / previous increment of the partial integrals
};

struct AdmissibilityReport {
  double g_min = 0.0;  // b_x - (b sigma_x + sigma_t)/sigma - sigma sigma_xx / 2 on the grid
  double g_max = 0.0;
  double g_max_inner = 0.0;  // max |g| on the inner half of the x grid
  bool bounded = false;      // heuristic: outer max |g| within 10x the inner one
  bool non_negative = false;
  bool sigma_positive = false;
  double linear_growth_b = 0.0;      // max |b| / (1 + |x|)
  double linear_growth_sigma = 0.0;  // max sigma / (1 + |x|)
  EndpointDivergence lower, upper;
  bool condition_iii = false;
  bool admissible = false;
};

AdmissibilityReport admissibility_report(const DiffusionSpec& spec, std::span<const double> t_grid,
                                         std::span<const double> x_grid, double x1);

int min_euler_steps(const std::function<double(double t, double y)>& beta, double T, std::span<const double> t_grid,
                    std::span<const double> y_grid);
int min_euler_steps(const DiffusionSpec& spec, double x1, double T, std::span<const double> t_grid,
                    std::span<const double> y_grid);

}  // namespace limitpost
