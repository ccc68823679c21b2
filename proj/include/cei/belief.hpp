#pragma once

#include <cstddef>
#include <vector>

namespace cei {

struct BeliefParams {
  double horizon = 4.0;      // prediction horizon, s
  double point_rate = 4.0;   // belief points per second
  double a_c = 1.0;          // comfortable-acceleration scale in the likelihood, m/s^2
  double init_a_max = 2.5;   // physical bound used for the initial spread, m/s^2

  std::size_t point_count() const {
    return static_cast<std::size_t>(horizon * point_rate + 0.5);
  }
  double spacing() const { return 1.0 / point_rate; }
};

// Gaussian estimate of the other vehicle's arc position at a fixed wall-clock
// time. Lead times shrink as the simulation advances; the point expires when
// its target time is reached.
struct BeliefPoint {
  double target_time = 0.0;  // absolute clock the estimate refers to, s
  double mu = 0.0;           // mean arc position, m
  double sigma = 0.0;        // standard deviation, m
};

struct Belief {
  std::vector<BeliefPoint> points;  // ascending target_time
};

// Velocity observation model implied by a believed displacement over a lead
// time: the average velocity, with a spread from comfortable acceleration.
struct VelocityLikelihood {
  double mean = 0.0;  // m/s
  double sd = 0.0;    // m/s
};

VelocityLikelihood likelihood_params(const BeliefParams& p, double displacement,
                                     double lead);

// Fresh point from current kinematics: constant-velocity mean, spread wide
// enough that a constant acceleration of +/- init_a_max over the lead stays
// within three standard deviations.
BeliefPoint init_point(const BeliefParams& p, double other_s, double other_v,
                       double now, double lead);

Belief init_belief(const BeliefParams& p, double other_s, double other_v, double now);

// Drop points whose target time has been reached and append fresh ones at the
// horizon tail so the count stays constant. Rolls, then the caller updates.
void roll(const BeliefParams& p, Belief& belief, double now, double other_s,
          double other_v);

// Conjugate update of one point from an observed velocity of the other
// vehicle. The observation constrains the displacement d = position -
// other_current_s through v ~ N(d / lead, (a_c lead / 6)^2).
BeliefPoint update_point(const BeliefParams& p, const BeliefPoint& prior, double lead,
                         double observed_v, double other_current_s);

void update_all(const BeliefParams& p, Belief& belief, double now, double observed_v,
                double other_current_s);

}  // namespace cei
