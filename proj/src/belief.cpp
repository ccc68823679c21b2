#include "cei/belief.hpp"

#include <cmath>
#include <stdexcept>

namespace cei {

namespace {
constexpr double kTimeEps = 1e-9;
}

VelocityLikelihood likelihood_params(const BeliefParams& p, double displacement,
                                     double lead) {
  if (lead <= 0.0) throw std::domain_error("likelihood_params: non-positive lead");
  return {displacement / lead, p.a_c * lead / 6.0};
}

BeliefPoint init_point(const BeliefParams& p, double other_s, double other_v,
                       double now, double lead) {
  if (lead <= 0.0) throw std::domain_error("init_point: non-positive lead");
  BeliefPoint pt;
  pt.target_time = now + lead;
  pt.mu = other_s + other_v * lead;
  pt.sigma = p.init_a_max * lead * lead / 6.0;
  return pt;
}

Belief init_belief(const BeliefParams& p, double other_s, double other_v, double now) {
  Belief b;
  const std::size_t n = p.point_count();
  b.points.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) {
    b.points.push_back(init_point(p, other_s, other_v, now, k * p.spacing()));
  }
  return b;
}

void roll(const BeliefParams& p, Belief& belief, double now, double other_s,
          double other_v) {
  std::size_t expired = 0;
  while (expired < belief.points.size() &&
         belief.points[expired].target_time <= now + kTimeEps) {
    ++expired;
  }
  if (expired == 0) return;
  belief.points.erase(belief.points.begin(), belief.points.begin() + expired);
  while (belief.points.size() < p.point_count()) {
    const double tail = belief.points.empty() ? now : belief.points.back().target_time;
    const double target = std::max(tail + p.spacing(), now + p.spacing());
    belief.points.push_back(init_point(p, other_s, other_v, now, target - now));
  }
}

BeliefPoint update_point(const BeliefParams& p, const BeliefPoint& prior, double lead,
                         double observed_v, double other_current_s) {
  if (prior.sigma <= 0.0) throw std::domain_error("update_point: non-positive sigma");
  BeliefPoint post = prior;
  const double var0 = prior.sigma * prior.sigma;
  const double prior_d = prior.mu - other_current_s;
  const double meas_prec = 36.0 / (p.a_c * p.a_c * lead * lead * lead * lead);
  const double prec = 1.0 / var0 + meas_prec;
  const double mean_d = (prior_d / var0 + observed_v * meas_prec * lead) / prec;
  post.mu = other_current_s + mean_d;
  post.sigma = std::sqrt(1.0 / prec);
  return post;
}

void update_all(const BeliefParams& p, Belief& belief, double now, double observed_v,
                double other_current_s) {
  for (auto& pt : belief.points) {
    const double lead = pt.target_time - now;
    if (lead <= kTimeEps) continue;
    pt = update_point(p, pt, lead, observed_v, other_current_s);
  }
}

}  // namespace cei
