#include "cei/engine.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

namespace cei {

const char* trace_event_name(TraceEvent e) {
  switch (e) {
    case TraceEvent::kNone: return "none";
    case TraceEvent::kReplanUpper: return "replan_upper";
    case TraceEvent::kReplanLower: return "replan_lower";
    case TraceEvent::kInfeasible: return "infeasible";
  }
  return "none";
}

namespace {

struct Agent {
  Side side = Side::kLeft;
  VehicleState x;
  Belief belief;
  Plan plan;
  double last_replan_at = 0.0;
  RiskThresholds thresholds;
  PlannerParams planner;
};

// Everything one agent produces during a tick, buffered so the trace can be
// emitted left-then-right no matter which agent was processed first.
struct TickOutput {
  TraceRecord row;
  bool replanned = false;
  ReplanLogEntry log;
};

Agent make_agent(Side side, const ScenarioConfig& config) {
  const DriverConfig& own = side == Side::kLeft ? config.left : config.right;
  const DriverConfig& other = side == Side::kLeft ? config.right : config.left;
  Agent ag;
  ag.side = side;
  ag.x = VehicleState{own.x0, own.v0, 0.0};
  ag.thresholds = RiskThresholds{own.rho_lower, own.rho_upper, own.tau};
  ag.planner.v_desired = own.v_desired;
  ag.planner.constraint_level = ag.thresholds.constraint_level();
  ag.belief = init_belief(config.belief, other.x0, other.v0, 0.0);
  ag.plan = initial_plan(config.dynamics, ag.planner, ag.x, 0.0);
  ag.last_replan_at = 0.0;  // the initial plan starts the settling clock
  return ag;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, const EngineOptions& options) {
  Track track(config.track);
  return run_scenario(track, config, options);
}

RunResult run_scenario(const Track& track, const ScenarioConfig& config,
                       const EngineOptions& options) {
  validate(config);
  const DynamicsParams& dyn = config.dynamics;
  const BeliefParams& bp = config.belief;
  const double dt = dyn.dt;
  const double total = config.track.total_length();

  Agent agents[2] = {make_agent(Side::kLeft, config), make_agent(Side::kRight, config)};

  RunResult out;
  out.trace.reserve(2 * static_cast<std::size_t>(config.time_cap / dt) + 2);

  for (std::size_t tick = 0;; ++tick) {
    const double now = static_cast<double>(tick) * dt;

    // End conditions, checked on the pre-tick state. Collision wins over
    // finishing: an overlapping configuration invalidates the run.
    if (track.bodies_overlap(agents[0].x.s, agents[1].x.s)) {
      out.outcome.collided = true;
      out.outcome.end_reason = "collision";
      out.outcome.final_time = now;
      break;
    }
    if (agents[0].x.s >= total && agents[1].x.s >= total) {
      out.outcome.end_reason = "finished";
      out.outcome.final_time = now;
      break;
    }
    if (now >= config.time_cap - 1e-9) {
      out.outcome.end_reason = "time_cap";
      out.outcome.final_time = now;
      break;
    }

    // Shared snapshot: both agents observe the same pre-tick state.
    const VehicleState before[2] = {agents[0].x, agents[1].x};

    TickOutput results[2];
    int order[2] = {0, 1};
    if (options.swap_agent_order) {
      order[0] = 1;
      order[1] = 0;
    }

    auto process = [&](int idx) {
      Agent& ag = agents[idx];
      const VehicleState& other = before[1 - idx];

      roll(bp, ag.belief, now, other.s, other.v);
      update_all(bp, ag.belief, now, other.v, other.s);

      // Align the receding horizon with the clock; the initial plan is
      // already aligned on the first tick.
      if (tick > 0) ag.plan = continue_plan(dyn, ag.plan, now);

      RiskEvaluation eval = evaluate(track, ag.side, ag.x, ag.plan.states, dt, now,
                                     ag.belief, BoundsMode::kExact);
      TriggerDecision decision =
          trigger(ag.thresholds, eval.max_risk, now - ag.last_replan_at);

      TraceEvent event = TraceEvent::kNone;
      if (decision != TriggerDecision::kContinue) {
        ReplanDiagnostics diag;
        ag.plan = replan(track, dyn, ag.planner, ag.side, ag.x, ag.belief, now,
                         ag.plan, &diag);
        ag.last_replan_at = now;
        eval = evaluate(track, ag.side, ag.x, ag.plan.states, dt, now, ag.belief,
                        BoundsMode::kExact);
        event = !ag.plan.risk_feasible     ? TraceEvent::kInfeasible
                : decision == TriggerDecision::kReplanUpper ? TraceEvent::kReplanUpper
                                                            : TraceEvent::kReplanLower;
        results[idx].replanned = true;
        results[idx].log.time = now;
        results[idx].log.side = ag.side;
        results[idx].log.reason = decision;
        results[idx].log.flagged_infeasible = !ag.plan.risk_feasible;
        results[idx].log.diag = diag;
      }

      TraceRecord& row = results[idx].row;
      row.time = now;
      row.side = ag.side;
      row.s = ag.x.s;
      row.v = ag.x.v;
      row.max_risk = eval.max_risk;
      row.event = event;
    };

    if (options.parallel_agents) {
#pragma omp parallel for num_threads(2) schedule(static)
      for (int k = 0; k < 2; ++k) process(order[k]);
    } else {
      for (int k = 0; k < 2; ++k) process(order[k]);
    }

    if (options.record_belief) {
      for (const Agent& ag : agents)
        for (const BeliefPoint& pt : ag.belief.points)
          out.belief_trace.push_back({now, ag.side, pt.target_time, pt.mu, pt.sigma});
    }

    // Execute both plan heads against the same snapshot.
    for (int i = 0; i < 2; ++i) {
      Agent& ag = agents[i];
      ag.x = step(dyn, ag.x, ag.plan.inputs.front());
      results[i].row.a_in = ag.x.a_in;
      results[i].row.a_net = (ag.x.v - before[i].v) / dt;
    }

    // Merge-point crossings, located within the step by the linear position
    // update (positions advance at the pre-step velocity).
    if (config.track.kind == TrackKind::kMerge) {
      const double lb = config.track.merge_point();
      for (int i = 0; i < 2; ++i) {
        if (before[i].s < lb && agents[i].x.s >= lb) {
          const double frac = (lb - before[i].s) / (agents[i].x.s - before[i].s);
          const double t_cross = now + frac * dt;
          auto& slot = i == 0 ? out.outcome.merge_time_left : out.outcome.merge_time_right;
          slot = t_cross;
        }
      }
      if (!out.outcome.headway_at_merge && out.outcome.merge_time_left &&
          out.outcome.merge_time_right) {
        const double tl = *out.outcome.merge_time_left;
        const double tr = *out.outcome.merge_time_right;
        const int leader = tl <= tr ? 0 : 1;  // first one through
        const double t_second = tl <= tr ? tr : tl;
        // The second vehicle sits exactly at the merge point at t_second; the
        // leader's position interpolates within the current step.
        const double leader_pos =
            before[leader].s + before[leader].v * (t_second - now);
        out.outcome.headway_at_merge = leader_pos - lb;
      }
    }

    out.trace.push_back(results[0].row);
    out.trace.push_back(results[1].row);
    for (int i = 0; i < 2; ++i)
      if (results[i].replanned) out.replans.push_back(results[i].log);
  }

  if (out.outcome.merge_time_left || out.outcome.merge_time_right) {
    const double tl = out.outcome.merge_time_left.value_or(
        std::numeric_limits<double>::infinity());
    const double tr = out.outcome.merge_time_right.value_or(
        std::numeric_limits<double>::infinity());
    out.outcome.first_through_merge = tl <= tr ? Side::kLeft : Side::kRight;
  }
  return out;
}

}  // namespace cei
