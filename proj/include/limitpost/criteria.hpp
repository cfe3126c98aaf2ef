#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "limitpost/cost.hpp"
#include "limitpost/market_model.hpp"

// Sufficient conditions for monotony and convexity of the cost, specialised
// to the exponential intensity where every k-type constant equals k.
namespace limitpost {

struct StructuralCheck {
  bool ok = false;
  double log_threshold = 0.0;  // ln(2 T lambda(-S0))
  double threshold = 0.0;      // +inf when it overflows
};

StructuralCheck structural_check(const ExecutionSetup& setup, const IntensityModel& model);

double kappa_bound_origin(const ExecutionSetup& setup, const IntensityModel& model, const PenaltySpec& phi,
                          double expected_ST);

double kappa_bound_global(const ExecutionSetup& setup, const IntensityModel& model, const PenaltySpec& phi,
                          double s_star);

struct ConvexityBound {
  double q_threshold = 0.0;  // 2 T lambda(-S0), may be +inf
  double log_q_threshold = 0.0;
  double kappa_ceiling = 0.0;
  std::optional<RhoVerdict> rho;  // absent under the identity penalty
};

ConvexityBound kappa_bound_convexity(const ExecutionSetup& setup, const IntensityModel& model, const PenaltySpec& phi,
                                     double expected_ST);

struct SharpBounds {
  double b2 = 0.0;
  double b2_se = 0.0;  // delta method on the ratio of means
  std::vector<double> deltas;
  std::vector<double> A, A_se, B, B_se;
  std::vector<bool> d_plus;  // B(delta) > 0
  std::optional<double> min_AB;
  double min_AB_se = 0.0;
  std::size_t n_paths = 0;
};

// Integrands of the sharper bounds on one path.
struct SharpIntegrands {
  double b2_num;
  double b2_den;
};
SharpIntegrands b2_integrands(const CostModel& p, const PricePath& path);
double a_integrand(const CostModel& p, double delta, const PricePath& path);
double b_integrand_general(const CostModel& p, double delta, const PricePath& path);
double b_integrand_identity(const CostModel& p, double delta, const PricePath& path);

SharpBounds sharp_bounds_mc(const CostModel& p, const PathSource& source, std::size_t M,
                            std::span<const double> delta_grid, Execution exec = Execution::parallel);

struct CriteriaReport {
  StructuralCheck structural;
  double expected_ST = 0.0;
  double s_star = 0.0;
  double kappa = 0.0;
  double kappa_origin_bound = 0.0;
  double kappa_global_bound = 0.0;
  ConvexityBound convexity;
  std::optional<SharpBounds> sharp;

  bool origin_ok() const { return kappa <= kappa_origin_bound; }
  bool global_ok() const { return kappa <= kappa_global_bound; }
  bool convexity_ok(int Q) const;
  bool sharp_origin_ok() const { return sharp && kappa < sharp->b2; }
  bool sharp_convexity_ok() const { return sharp && (!sharp->min_AB || kappa < *sharp->min_AB); }
  bool all_conservative_ok(int Q) const { return structural.ok && origin_ok() && global_ok() && convexity_ok(Q); }
};

CriteriaReport check_criteria(const CostModel& p, double expected_ST, double s_star,
                              std::optional<SharpBounds> sharp = std::nullopt);

// key = value lines.
void write_criteria_report(std::ostream& out, const CriteriaReport& r, int Q);

}  // namespace limitpost
