#pragma once

#include <string>
#include <vector>

#include "cei/engine.hpp"

namespace cei {

// Bumper-to-bumper gap between the two vehicles over a run, sampled per tick.
struct GapTrajectory {
  std::vector<double> time;
  std::vector<double> gap;  // leading rear bumper to trailing front bumper, m
};

GapTrajectory gap_trajectory(const RunResult& run, double vehicle_length);

// Mean gap over the final window seconds of the trajectory.
double steady_state_gap(const GapTrajectory& traj, double window);

// Mean |gap change| per second over the final window seconds; a settled
// following distance drives this toward zero.
double mean_abs_gap_rate(const GapTrajectory& traj, double window);

struct LinearFit {
  bool valid = false;  // needs at least two points and nonzero x spread
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit ols_fit(const std::vector<double>& x, const std::vector<double>& y);

struct SweepRow {
  double velocity = 0.0;       // follower initial/desired velocity, m/s
  bool collided = false;
  std::string end_reason;
  double steady_gap = 0.0;     // m; meaningful only when !collided
  double gap_rate = 0.0;       // mean |dgap/dt| over the final second, m/s
};

struct SweepResult {
  std::vector<SweepRow> rows;
  LinearFit fit;  // steady gap vs. velocity over non-collided rows
};

// Runs the car-following protocol once per velocity. Runs are independent;
// with parallel=true they execute concurrently and still land in input order.
SweepResult run_gap_sweep(const std::vector<double>& velocities, bool parallel = true);

std::string sweep_csv(const SweepResult& result);

}  // namespace cei
