#include "cei/planner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace cei {

namespace {

constexpr double kArmijoSlope = 1e-4;
constexpr double kStepShrink = 0.5;
constexpr double kStepGrow = 1.3;
constexpr double kStepMax = 10.0;
constexpr double kStepMin = 1e-12;
constexpr double kMoveTol = 1e-9;

double normal_pdf(double z) {
  static const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * M_PI);
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

// Belief points mapped onto plan-state indices once per solve.
struct RiskStencil {
  struct Point {
    double mu = 0.0;
    double sigma = 1.0;
    int k0 = -1;  // state index, -1 meaning the (fixed) current position
    int k1 = -1;  // second index when the lead falls between plan steps
    double w0 = 1.0;
    double w1 = 0.0;
  };
  std::vector<Point> points;
};

RiskStencil make_stencil(const Belief& belief, double now, double dt, int n_steps) {
  RiskStencil st;
  st.points.reserve(belief.points.size());
  for (const auto& pt : belief.points) {
    const double lead = pt.target_time - now;
    if (lead <= 1e-9) continue;
    const double steps = lead / dt;
    long k = static_cast<long>(std::floor(steps + 1e-9));
    double frac = steps - static_cast<double>(k);
    if (frac <= 1e-9) frac = 0.0;
    if (k >= n_steps) {
      k = n_steps;
      frac = 0.0;
    }
    RiskStencil::Point p;
    p.mu = pt.mu;
    p.sigma = pt.sigma;
    p.k0 = static_cast<int>(k) - 1;
    p.w0 = 1.0 - frac;
    if (frac > 0.0) {
      p.k1 = static_cast<int>(k);
      p.w1 = frac;
    }
    st.points.push_back(p);
  }
  return st;
}

struct Rollout {
  std::vector<VehicleState> states;
  std::vector<char> clamped;  // velocity hit the zero clamp at this step
};

Rollout roll_forward(const DynamicsParams& dyn, const VehicleState& x0,
                     const std::vector<double>& a) {
  Rollout r;
  r.states.resize(a.size());
  r.clamped.assign(a.size(), 0);
  VehicleState x = x0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double ain = std::clamp(a[j], -dyn.a_max, dyn.a_max);
    VehicleState nx;
    nx.a_in = ain;
    nx.s = x.s + x.v * dyn.dt;
    nx.v = x.v + (ain - resistance(dyn, x.v)) * dyn.dt;
    if (nx.v < 0.0) {
      nx.v = 0.0;
      r.clamped[j] = 1;
    }
    r.states[j] = nx;
    x = nx;
  }
  return r;
}

struct Evaluation {
  double cost = 0.0;        // raw tracking cost
  double hard_risk = 0.0;   // max per-point risk (linearized bounds)
  double smooth_risk = 0.0; // log-sum-exp over per-point risks
  double objective = 0.0;   // cost + penalty * violation^2
};

// Objective and (optionally) its gradient for one candidate input vector.
Evaluation evaluate_objective(const Track* track, Side side, const DynamicsParams& dyn,
                    const PlannerParams& params, const VehicleState& x0,
                    const std::vector<double>& a, const Rollout& r,
                    const RiskStencil* stencil, double penalty,
                    std::vector<double>* grad_out) {
  const int n = static_cast<int>(a.size());
  Evaluation ev;
  for (int j = 0; j < n; ++j) {
    const double dv = r.states[j].v - params.v_desired;
    ev.cost += dv * dv + a[j] * a[j];
  }

  std::vector<double> risks;
  std::vector<double> drisk_ds;  // d risk_i / d own_s_i
  std::vector<double> gs_inject;
  if (stencil != nullptr) {
    const std::size_t m = stencil->points.size();
    risks.resize(m, 0.0);
    drisk_ds.resize(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& p = stencil->points[i];
      double own_s = p.w0 * (p.k0 < 0 ? x0.s : r.states[p.k0].s);
      if (p.k1 >= 0) own_s += p.w1 * r.states[p.k1].s;
      const LinearizedBounds b = track->linearized_with_slopes(own_s, side);
      if (b.empty || p.sigma <= 0.0) continue;
      const double inv = 1.0 / p.sigma;
      const double zu = (b.upper - p.mu) * inv;
      const double zl = (b.lower - p.mu) * inv;
      risks[i] = normal_cdf(zu) - normal_cdf(zl);
      drisk_ds[i] = (normal_pdf(zu) * b.dupper - normal_pdf(zl) * b.dlower) * inv;
    }
    double rmax = 0.0;
    for (const double ri : risks) rmax = std::max(rmax, ri);
    ev.hard_risk = rmax;
    const double temp = params.softmax_temp;
    double z = 0.0;
    for (const double ri : risks) z += std::exp(temp * (ri - rmax));
    ev.smooth_risk = rmax + std::log(z) / temp;
    const double violation = std::max(0.0, ev.smooth_risk - params.constraint_level);
    ev.objective = ev.cost + penalty * violation * violation;

    if (grad_out != nullptr && violation > 0.0 && penalty > 0.0) {
      gs_inject.assign(n, 0.0);
      const double outer = 2.0 * penalty * violation;
      for (std::size_t i = 0; i < risks.size(); ++i) {
        const double w = std::exp(temp * (risks[i] - rmax)) / z;
        const double g = outer * w * drisk_ds[i];
        if (g == 0.0) continue;
        const auto& p = stencil->points[i];
        if (p.k0 >= 0) gs_inject[p.k0] += g * p.w0;
        if (p.k1 >= 0) gs_inject[p.k1] += g * p.w1;
      }
    }
  } else {
    ev.objective = ev.cost;
  }

  if (grad_out != nullptr) {
    std::vector<double>& grad = *grad_out;
    grad.assign(n, 0.0);
    double gs = 0.0, gv = 0.0;
    for (int j = n - 1; j >= 0; --j) {
      gv += 2.0 * (r.states[j].v - params.v_desired);
      if (!gs_inject.empty()) gs += gs_inject[j];
      const bool blocked = r.clamped[j] != 0;
      grad[j] = 2.0 * a[j] + (blocked ? 0.0 : gv * dyn.dt);
      const double v_prev = j > 0 ? r.states[j - 1].v : x0.v;
      const double dvdv = blocked ? 0.0 : 1.0 - 2.0 * dyn.alpha * v_prev * dyn.dt;
      gv = gv * dvdv + gs * dyn.dt;
    }
  }
  return ev;
}

struct SolveResult {
  std::vector<double> a;
  Rollout roll;
  Evaluation eval;
  int iterations = 0;
  bool feasible = true;
  // Closest-to-feasible iterate seen anywhere in the solve.
  std::vector<double> best_a;
  double best_risk = std::numeric_limits<double>::infinity();
  double best_cost = std::numeric_limits<double>::infinity();
};

SolveResult solve(const Track* track, Side side, const DynamicsParams& dyn,
                  const PlannerParams& params, const VehicleState& x0,
                  std::vector<double> a, const RiskStencil* stencil) {
  SolveResult res;
  for (double& ai : a) ai = std::clamp(ai, -dyn.a_max, dyn.a_max);

  const int stages = stencil != nullptr ? params.penalty_stages : 1;
  const int cap = stencil != nullptr
                      ? params.max_iter_per_stage
                      : params.max_iter_per_stage * params.penalty_stages;

  Rollout r = roll_forward(dyn, x0, a);
  std::vector<double> grad;
  double eta = 0.1;

  const auto consider_best = [&](const Evaluation& ev, const std::vector<double>& cand) {
    if (ev.hard_risk < res.best_risk - 1e-12 ||
        (std::abs(ev.hard_risk - res.best_risk) <= 1e-12 && ev.cost < res.best_cost)) {
      res.best_risk = ev.hard_risk;
      res.best_cost = ev.cost;
      res.best_a = cand;
    }
  };

  for (int stage = 0; stage < stages; ++stage) {
    const double penalty =
        stencil != nullptr ? params.penalty_init * std::pow(params.penalty_growth, stage)
                           : 0.0;
    Evaluation ev = evaluate_objective(track, side, dyn, params, x0, a, r, stencil, penalty, &grad);
    consider_best(ev, a);
    bool converged = false;

    for (int iter = 0; iter < cap && !converged; ++iter) {
      ++res.iterations;
      // Projected gradient step with backtracking on the step length.
      std::vector<double> next(a.size());
      double move = 0.0;
      while (true) {
        move = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
          next[j] = std::clamp(a[j] - eta * grad[j], -dyn.a_max, dyn.a_max);
          move = std::max(move, std::abs(next[j] - a[j]));
        }
        if (move == 0.0) {
          converged = true;
          break;
        }
        Rollout nr = roll_forward(dyn, x0, next);
        double sq = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
          const double d = next[j] - a[j];
          sq += d * d;
        }
        const Evaluation nev = evaluate_objective(track, side, dyn, params, x0, next,
                                                  nr, stencil, penalty, nullptr);
        if (nev.objective <= ev.objective - kArmijoSlope / eta * sq) {
          a.swap(next);
          r = std::move(nr);
          eta = std::min(eta * kStepGrow, kStepMax);
          break;
        }
        eta *= kStepShrink;
        if (eta < kStepMin) {
          converged = true;
          break;
        }
      }
      if (converged) break;
      ev = evaluate_objective(track, side, dyn, params, x0, a, r, stencil, penalty, &grad);
      consider_best(ev, a);
      if (move < kMoveTol) converged = true;
    }

    if (stencil == nullptr) {
      res.eval = evaluate_objective(track, side, dyn, params, x0, a, r, nullptr, 0.0, nullptr);
      break;
    }
    res.eval = evaluate_objective(track, side, dyn, params, x0, a, r, stencil, penalty, nullptr);
    if (res.eval.hard_risk <= params.constraint_level + params.constraint_tol) {
      break;  // feasible; later stages would only grind on a met constraint
    }
  }

  res.feasible = stencil == nullptr ||
                 res.eval.hard_risk <= params.constraint_level + params.constraint_tol;
  res.a = std::move(a);
  res.roll = std::move(r);
  return res;
}

Plan plan_from(const std::vector<double>& a, const Rollout& r, double now, bool feasible) {
  Plan p;
  p.inputs = a;
  p.states = r.states;
  p.created_at = now;
  p.risk_feasible = feasible;
  return p;
}

}  // namespace

double plan_cost(const DynamicsParams&, double v_desired,
                 const std::vector<double>& inputs,
                 const std::vector<VehicleState>& states) {
  double c = 0.0;
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    const double dv = states[j].v - v_desired;
    c += dv * dv + inputs[j] * inputs[j];
  }
  return c;
}

std::vector<double> cost_gradient(const DynamicsParams& dyn, double v_desired,
                                  const VehicleState& x0,
                                  const std::vector<double>& inputs) {
  PlannerParams params;
  params.v_desired = v_desired;
  const Rollout r = roll_forward(dyn, x0, inputs);
  std::vector<double> grad;
  evaluate_objective(nullptr, Side::kLeft, dyn, params, x0, inputs, r, nullptr, 0.0, &grad);
  return grad;
}

Plan initial_plan(const DynamicsParams& dyn, const PlannerParams& params,
                  const VehicleState& x0, double now) {
  std::vector<double> zeros(params.horizon_steps, 0.0);
  SolveResult res = solve(nullptr, Side::kLeft, dyn, params, x0, std::move(zeros), nullptr);
  return plan_from(res.a, res.roll, now, true);
}

Plan continue_plan(const DynamicsParams& dyn, const Plan& plan, double now) {
  Plan out;
  out.created_at = plan.created_at;
  out.risk_feasible = plan.risk_feasible;
  out.inputs.assign(plan.inputs.begin() + 1, plan.inputs.end());
  out.states.assign(plan.states.begin() + 1, plan.states.end());
  const VehicleState& last = plan.states.back();
  const double hold = hold_input(dyn, last.v);
  out.inputs.push_back(hold);
  out.states.push_back(step(dyn, last, hold));
  (void)now;
  return out;
}

Plan replan(const Track& track, const DynamicsParams& dyn, const PlannerParams& params,
            Side own_side, const VehicleState& x0, const Belief& belief, double now,
            const Plan& warm_start, ReplanDiagnostics* diag) {
  const RiskStencil stencil = make_stencil(belief, now, dyn.dt, params.horizon_steps);

  std::vector<double> warm = warm_start.inputs;
  warm.resize(params.horizon_steps, warm.empty() ? 0.0 : hold_input(dyn, x0.v));

  SolveResult first = solve(&track, own_side, dyn, params, x0, warm, &stencil);
  if (diag != nullptr) {
    diag->iterations = first.iterations;
    diag->used_candidate_stage = false;
    diag->chosen_candidate = -1;
  }
  if (first.feasible) {
    if (diag != nullptr) {
      diag->achieved_risk = first.eval.hard_risk;
      diag->cost = first.eval.cost;
    }
    return plan_from(first.a, first.roll, now, true);
  }

  // The warm start could not be bent under the constraint: try a fresh
  // strategy. Constant full braking, coasting, and full acceleration are
  // rolled out, the cheapest one seeds a second constrained optimization.
  const std::array<double, 3> levels{-dyn.a_max, 0.0, dyn.a_max};
  int chosen = 0;
  double chosen_cost = std::numeric_limits<double>::infinity();
  for (int c = 0; c < 3; ++c) {
    std::vector<double> cand(params.horizon_steps, levels[c]);
    const Rollout r = roll_forward(dyn, x0, cand);
    const double cost = plan_cost(dyn, params.v_desired, cand, r.states);
    if (cost < chosen_cost) {
      chosen_cost = cost;
      chosen = c;
    }
  }
  std::vector<double> seed(params.horizon_steps, levels[chosen]);
  SolveResult second = solve(&track, own_side, dyn, params, x0, std::move(seed), &stencil);
  if (diag != nullptr) {
    diag->iterations = first.iterations + second.iterations;
    diag->used_candidate_stage = true;
    diag->chosen_candidate = chosen;
  }
  if (second.feasible) {
    if (diag != nullptr) {
      diag->achieved_risk = second.eval.hard_risk;
      diag->cost = second.eval.cost;
    }
    return plan_from(second.a, second.roll, now, true);
  }

  // Constraint out of reach: fall back to the iterate that came closest.
  const bool first_better =
      first.best_risk < second.best_risk - 1e-12 ||
      (std::abs(first.best_risk - second.best_risk) <= 1e-12 &&
       first.best_cost <= second.best_cost);
  const SolveResult& best = first_better ? first : second;
  const Rollout r = roll_forward(dyn, x0, best.best_a);
  if (diag != nullptr) {
    diag->achieved_risk = best.best_risk;
    diag->cost = best.best_cost;
  }
  return plan_from(best.best_a, r, now, false);
}

double plan_linearized_risk(const Track& track, Side own_side, const VehicleState& x0,
                            const Plan& plan, const DynamicsParams& dyn, double now,
                            const Belief& belief) {
  return evaluate(track, own_side, x0, plan.states, dyn.dt, now, belief,
                  BoundsMode::kLinearized)
      .max_risk;
}

}  // namespace cei
