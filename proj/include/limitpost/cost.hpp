#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "limitpost/market_model.hpp"
#include "limitpost/mc.hpp"
#include "limitpost/penalty.hpp"
#include "limitpost/price_path.hpp"
#include "limitpost/price_paths.hpp"

namespace limitpost {

// One optimization problem: setup, intensity and penalty.
struct CostModel {
  ExecutionSetup setup;
  IntensityModel model;
  PenaltySpec penalty;
};

// Conditional cost given Lambda = mu and the path's initial and terminal prices.
double cost_tilde(const CostModel& p, double delta, double Lambda, double x0, double xT);

// Gradient integrand H. The general form uses phi; the identity form is the
// dedicated Phi = id expression and ignores p.penalty.
double h_general(const CostModel& p, double delta, const LambdaTriple& L, double x0, double xT);
double h_identity(const CostModel& p, double delta, const LambdaTriple& L, double x0, double xT);
double h_func(const CostModel& p, double delta, const PricePath& path);

double c_second_general(const CostModel& p, double delta, const LambdaTriple& L, double x0, double xT);
double c_second_identity(const CostModel& p, double delta, const LambdaTriple& L, double x0, double xT);
double c_second_integrand(const CostModel& p, double delta, const PricePath& path);

struct Integrands {
  double cost;
  double grad;
  double second;
};

// All three integrands from a single Poisson pass.
Integrands evaluate_path(const CostModel& p, double delta, const PricePath& path);

struct CostCurve {
  std::vector<double> deltas;
  std::vector<double> c, c_se;
  std::vector<double> cp, cp_se;
  std::vector<double> cpp, cpp_se;
  std::size_t n_paths = 0;
};

// Averages over the same M paths at every delta. Throws SourceExhausted if
// the source holds fewer than M paths.
CostCurve mc_cost_curve(const CostModel& p, std::span<const double> deltas, const PathSource& source, std::size_t M,
                        Execution exec = Execution::parallel);

struct GridMin {
  double delta;
  double c;
  std::size_t index;
};

GridMin grid_argmin(const CostCurve& curve);

std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

void write_cost_curve_csv(std::ostream& out, const CostCurve& curve);

// Finite differences of the per-path cost against the representation
// integrands, all on common paths.
struct FiniteDifferenceCheck {
  std::vector<double> deltas;
  std::vector<double> fd1, fd1_se, cp, cp_se;
  std::vector<double> fd2, fd2_se, cpp, cpp_se;
  double h = 0.0;
  std::size_t n_paths = 0;

  // |fd - representation| <= z * sqrt(se_fd^2 + se_rep^2)
  std::size_t first_order_agreements(double z) const;
  std::size_t second_order_agreements(double z) const;
};

FiniteDifferenceCheck mc_finite_difference_check(const CostModel& p, std::span<const double> deltas, double h,
                                                 const PathSource& source, std::size_t M,
                                                 Execution exec = Execution::parallel);

// Throws SourceExhausted when a finite source holds fewer than M paths.
void require_paths(const PathSource& source, std::size_t M);

}  // namespace limitpost
