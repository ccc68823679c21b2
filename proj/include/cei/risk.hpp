#pragma once

#include <vector>

#include "cei/belief.hpp"
#include "cei/dynamics.hpp"
#include "cei/track.hpp"

namespace cei {

struct RiskThresholds {
  double rho_lower = 0.2;   // below this (after tau) the plan is too cautious
  double rho_upper = 0.5;   // above this the plan is unacceptable
  double tau = 2.0;         // minimum settling time before a lower re-plan, s

  double constraint_level() const { return 0.5 * (rho_lower + rho_upper); }
};

enum class BoundsMode { kExact, kLinearized };

struct PointRisk {
  double target_time = 0.0;
  double lead = 0.0;
  double probability = 0.0;
};

struct RiskEvaluation {
  double max_risk = 0.0;
  double argmax_time = 0.0;  // target time of the riskiest belief point
  std::vector<PointRisk> per_point;
};

enum class TriggerDecision { kContinue, kReplanUpper, kReplanLower };

// Standard normal CDF.
double normal_cdf(double z);

// Probability mass of one belief point inside the collision bounds taken at
// the own planned position.
double point_collision_probability(const Track& track, double own_planned_s,
                                   Side own_side, const BeliefPoint& point,
                                   BoundsMode mode);

// Perceived risk of a planned trajectory: the worst belief point. Planned
// positions are matched to belief lead times; every fifth 20 Hz plan state
// lines up exactly with the 4 Hz belief grid, anything else interpolates.
RiskEvaluation evaluate(const Track& track, Side own_side, const VehicleState& x0,
                        const std::vector<VehicleState>& plan_states, double dt,
                        double now, const Belief& belief, BoundsMode mode);

TriggerDecision trigger(const RiskThresholds& t, double max_risk,
                        double time_since_replan);

}  // namespace cei
