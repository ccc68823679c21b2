#pragma once

#include <vector>

#include "cei/belief.hpp"
#include "cei/dynamics.hpp"
#include "cei/risk.hpp"
#include "cei/track.hpp"

namespace cei {

struct PlannerParams {
  double v_desired = 10.0;      // m/s
  int horizon_steps = 80;       // plan length at the dynamics rate
  double constraint_level = 0.35;  // target max risk for re-plans
  double constraint_tol = 1e-3;
  int max_iter_per_stage = 200;
  int penalty_stages = 5;
  double penalty_init = 100.0;
  double penalty_growth = 10.0;
  double softmax_temp = 50.0;   // smooth-max sharpness over per-point risks
};

struct Plan {
  std::vector<double> inputs;         // one clipped input per step
  std::vector<VehicleState> states;   // states[j] is reached after inputs[j]
  double created_at = 0.0;            // clock of the last optimization
  bool risk_feasible = true;          // false when the constraint was given up on
};

struct ReplanDiagnostics {
  int iterations = 0;
  bool used_candidate_stage = false;
  int chosen_candidate = -1;  // 0 braking, 1 zero, 2 accelerating
  double achieved_risk = 0.0; // linearized max risk of the returned plan
  double cost = 0.0;
};

// Quadratic tracking cost: sum of squared velocity error and squared input
// over the horizon.
double plan_cost(const DynamicsParams& dyn, double v_desired,
                 const std::vector<double>& inputs,
                 const std::vector<VehicleState>& states);

// Analytic gradient of plan_cost with respect to the inputs, via a backward
// sweep through the Euler recursion.
std::vector<double> cost_gradient(const DynamicsParams& dyn, double v_desired,
                                  const VehicleState& x0,
                                  const std::vector<double>& inputs);

// Unconstrained plan from a zero-input start.
Plan initial_plan(const DynamicsParams& dyn, const PlannerParams& params,
                  const VehicleState& x0, double now);

// Shift the receding horizon by one step: drop the consumed head and extend
// the tail with a velocity-hold input.
Plan continue_plan(const DynamicsParams& dyn, const Plan& plan, double now);

// Re-optimize under the risk constraint (linearized bounds), warm-started
// from the previous plan. Falls back to the best of three constant-input
// candidates re-optimized the same way; if the constraint is still out of
// reach, returns the minimum-risk iterate flagged infeasible.
Plan replan(const Track& track, const DynamicsParams& dyn, const PlannerParams& params,
            Side own_side, const VehicleState& x0, const Belief& belief, double now,
            const Plan& warm_start, ReplanDiagnostics* diag = nullptr);

// Linearized-bounds max risk of a plan, the quantity the constraint acts on.
double plan_linearized_risk(const Track& track, Side own_side, const VehicleState& x0,
                            const Plan& plan, const DynamicsParams& dyn, double now,
                            const Belief& belief);

}  // namespace cei
