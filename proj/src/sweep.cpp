#include "cei/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "cei/scenario.hpp"

namespace cei {

GapTrajectory gap_trajectory(const RunResult& run, double vehicle_length) {
  GapTrajectory traj;
  traj.time.reserve(run.trace.size() / 2);
  traj.gap.reserve(run.trace.size() / 2);
  for (std::size_t i = 0; i + 1 < run.trace.size(); i += 2) {
    const TraceRecord& left = run.trace[i];
    const TraceRecord& right = run.trace[i + 1];
    traj.time.push_back(left.time);
    // The right vehicle leads in the car-following protocol; the measure is
    // symmetric in case a config reverses the roles.
    traj.gap.push_back(std::abs(right.s - left.s) - vehicle_length);
  }
  return traj;
}

namespace {

std::size_t window_start(const GapTrajectory& traj, double window) {
  if (traj.time.empty()) return 0;
  const double cutoff = traj.time.back() - window;
  std::size_t i = traj.time.size();
  while (i > 0 && traj.time[i - 1] > cutoff + 1e-12) --i;
  return i;
}

}  // namespace

double steady_state_gap(const GapTrajectory& traj, double window) {
  if (traj.gap.empty()) throw std::invalid_argument("empty gap trajectory");
  const std::size_t start = window_start(traj, window);
  double sum = 0.0;
  for (std::size_t i = start; i < traj.gap.size(); ++i) sum += traj.gap[i];
  return sum / static_cast<double>(traj.gap.size() - start);
}

double mean_abs_gap_rate(const GapTrajectory& traj, double window) {
  if (traj.gap.size() < 2) throw std::invalid_argument("gap trajectory too short");
  std::size_t start = window_start(traj, window);
  if (start == 0) start = 1;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = start; i < traj.gap.size(); ++i) {
    const double dt = traj.time[i] - traj.time[i - 1];
    sum += std::abs(traj.gap[i] - traj.gap[i - 1]) / dt;
    ++count;
  }
  return sum / static_cast<double>(count);
}

LinearFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit fit;
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) return fit;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) return fit;
  fit.valid = true;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy <= 0.0) {
    fit.r_squared = 1.0;  // all residuals are zero on a flat response
  } else {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (fit.intercept + fit.slope * x[i]);
      ss_res += r * r;
    }
    fit.r_squared = 1.0 - ss_res / syy;
  }
  return fit;
}

SweepResult run_gap_sweep(const std::vector<double>& velocities, bool parallel) {
  SweepResult result;
  result.rows.resize(velocities.size());
  const int n = static_cast<int>(velocities.size());

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int i = 0; i < n; ++i) {
    const ScenarioConfig config = gap_sweep_scenario(velocities[i]);
    const RunResult run = run_scenario(config);
    SweepRow row;
    row.velocity = velocities[i];
    row.collided = run.outcome.collided;
    row.end_reason = run.outcome.end_reason;
    if (!run.outcome.collided && run.trace.size() >= 4) {
      const GapTrajectory traj = gap_trajectory(run, config.track.vehicle_length);
      row.steady_gap = steady_state_gap(traj, 1.0);
      row.gap_rate = mean_abs_gap_rate(traj, 1.0);
    }
    result.rows[i] = row;
  }

  std::vector<double> vx, vy;
  for (const SweepRow& row : result.rows) {
    if (row.collided) continue;
    vx.push_back(row.velocity);
    vy.push_back(row.steady_gap);
  }
  result.fit = ols_fit(vx, vy);
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "velocity,steady_gap,gap_rate,collided,end_reason\n";
  char buf[160];
  for (const SweepRow& row : result.rows) {
    const int n =
        snprintf(buf, sizeof buf, "%.6g,%.6f,%.6f,%d,%s\n", row.velocity,
                 row.steady_gap, row.gap_rate, row.collided ? 1 : 0,
                 row.end_reason.c_str());
    if (n > 0) out.append(buf, static_cast<std::size_t>(n));
  }
  if (result.fit.valid) {
    const int n = snprintf(buf, sizeof buf,
                           "# fit: slope=%.6f intercept=%.6f r_squared=%.6f\n",
                           result.fit.slope, result.fit.intercept,
                           result.fit.r_squared);
    if (n > 0) out.append(buf, static_cast<std::size_t>(n));
  } else {
    out += "# fit: undefined\n";
  }
  return out;
}

}  // namespace cei
