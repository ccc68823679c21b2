#pragma once

#include <string>

#include "cei/engine.hpp"
#include "cei/scenario.hpp"
#include "cei/sweep.hpp"

namespace cei {

// Self-contained SVG with four stacked panels over simulated time: arc
// position, velocity, acceleration input, and perceived risk with the
// per-driver thresholds and re-plan markers (stars for upper, circles for
// lower, crosses for constraint-infeasible re-plans).
std::string run_panels_svg(const RunResult& run, const ScenarioConfig& config);

// Scatter of steady-state gap against follower velocity with the least-squares
// line; collided velocities are drawn as crosses and excluded from the fit.
std::string sweep_svg(const SweepResult& sweep);

}  // namespace cei
