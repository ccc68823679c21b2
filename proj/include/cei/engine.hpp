#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cei/belief.hpp"
#include "cei/dynamics.hpp"
#include "cei/planner.hpp"
#include "cei/risk.hpp"
#include "cei/scenario.hpp"
#include "cei/track.hpp"

namespace cei {

enum class TraceEvent { kNone, kReplanUpper, kReplanLower, kInfeasible };

const char* trace_event_name(TraceEvent e);

struct TraceRecord {
  double time = 0.0;
  Side side = Side::kLeft;
  double s = 0.0;
  double v = 0.0;
  double a_in = 0.0;     // input applied over this step
  double a_net = 0.0;    // realized net acceleration over this step
  double max_risk = 0.0; // perceived risk of the active plan (exact bounds)
  TraceEvent event = TraceEvent::kNone;
};

struct ReplanLogEntry {
  double time = 0.0;
  Side side = Side::kLeft;
  TriggerDecision reason = TriggerDecision::kContinue;
  bool flagged_infeasible = false;
  ReplanDiagnostics diag;
};

struct BeliefRecord {
  double time = 0.0;
  Side side = Side::kLeft;
  double target_time = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
};

struct SimOutcome {
  bool collided = false;
  std::optional<double> merge_time_left;
  std::optional<double> merge_time_right;
  std::optional<double> headway_at_merge;  // leader center lead when the second crosses, m
  std::optional<Side> first_through_merge;
  double final_time = 0.0;
  std::string end_reason;  // finished | collision | time_cap
};

struct RunResult {
  SimOutcome outcome;
  std::vector<TraceRecord> trace;      // two rows per tick, left then right
  std::vector<ReplanLogEntry> replans;
  std::vector<BeliefRecord> belief_trace;  // only when requested
};

struct EngineOptions {
  bool parallel_agents = false;   // evaluate the two agents' ticks concurrently
  bool swap_agent_order = false;  // process right before left (result-invariant)
  bool record_belief = false;
};

RunResult run_scenario(const ScenarioConfig& config, const EngineOptions& options = {});

// Variant sharing a prebuilt track (must match config.track).
RunResult run_scenario(const Track& track, const ScenarioConfig& config,
                       const EngineOptions& options = {});

}  // namespace cei
