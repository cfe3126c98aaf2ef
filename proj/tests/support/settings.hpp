#pragma once
// Reference parameter sets written out by hand, independent of the presets.
#include "limitpost/cost.hpp"

namespace settings {

inline limitpost::CostModel setting1() {
  return {limitpost::ExecutionSetup{10, 5.0, 6.0, 1.0, 100.0}, limitpost::IntensityModel{5.0, 1.0},
          limitpost::PenaltySpec::exponential_impact(1.0, 0.01)};
}

inline limitpost::CostModel setting2() {
  return {limitpost::ExecutionSetup{10, 5.0, 12.0, 1.0, 100.0}, limitpost::IntensityModel{5.0, 1.0},
          limitpost::PenaltySpec::identity()};
}

inline limitpost::CostModel with_penalty(limitpost::CostModel p, const limitpost::PenaltySpec& phi) {
  return {p.setup, p.model, phi};
}

}  // namespace settings
