#include "cei/risk.hpp"

#include <cmath>

namespace cei {

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z * M_SQRT1_2);
}

namespace {

double interval_probability(double lower, double upper, double mu, double sigma) {
  if (sigma <= 0.0) {
    return (mu >= lower && mu <= upper) ? 1.0 : 0.0;
  }
  const double inv = 1.0 / sigma;
  return normal_cdf((upper - mu) * inv) - normal_cdf((lower - mu) * inv);
}

}  // namespace

double point_collision_probability(const Track& track, double own_planned_s,
                                   Side own_side, const BeliefPoint& point,
                                   BoundsMode mode) {
  const CollisionBounds b = mode == BoundsMode::kExact
                                ? track.collision_bounds(own_planned_s, own_side)
                                : track.collision_bounds_linearized(own_planned_s, own_side);
  if (b.empty) return 0.0;
  return interval_probability(b.lower, b.upper, point.mu, point.sigma);
}

RiskEvaluation evaluate(const Track& track, Side own_side, const VehicleState& x0,
                        const std::vector<VehicleState>& plan_states, double dt,
                        double now, const Belief& belief, BoundsMode mode) {
  RiskEvaluation out;
  out.per_point.reserve(belief.points.size());
  for (const auto& pt : belief.points) {
    const double lead = pt.target_time - now;
    double own_s;
    const double steps = lead / dt;
    const auto k = static_cast<long>(std::floor(steps + 1e-9));
    if (k <= 0) {
      own_s = x0.s;
    } else if (static_cast<std::size_t>(k) >= plan_states.size()) {
      own_s = plan_states.back().s;
    } else {
      const double frac = steps - static_cast<double>(k);
      const double s_lo = plan_states[k - 1].s;
      if (frac <= 1e-9) {
        own_s = s_lo;
      } else {
        own_s = s_lo + frac * (plan_states[k].s - s_lo);
      }
    }
    const double p = point_collision_probability(track, own_s, own_side, pt, mode);
    out.per_point.push_back({pt.target_time, lead, p});
    if (p > out.max_risk) {
      out.max_risk = p;
      out.argmax_time = pt.target_time;
    }
  }
  if (!out.per_point.empty() && out.max_risk == 0.0) {
    out.argmax_time = out.per_point.front().target_time;
  }
  return out;
}

TriggerDecision trigger(const RiskThresholds& t, double max_risk,
                        double time_since_replan) {
  if (max_risk > t.rho_upper) return TriggerDecision::kReplanUpper;
  if (max_risk < t.rho_lower && time_since_replan > t.tau) {
    return TriggerDecision::kReplanLower;
  }
  return TriggerDecision::kContinue;
}

}  // namespace cei
