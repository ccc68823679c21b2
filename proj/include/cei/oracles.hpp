#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cei/belief.hpp"
#include "cei/dynamics.hpp"
#include "cei/track.hpp"

namespace cei {
namespace oracles {

// Deterministic standard-normal stream: xoshiro-free, fixed Box-Muller over a
// mt19937_64 so results are identical across platforms and thread counts.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}
  double next();

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Rectangle overlap decided by clipping one rectangle against the other's
// half-planes and measuring the residual area; independent of the projection
// test used in production. Touching configurations report no overlap.
bool rects_overlap_clip(const OrientedRect& a, const OrientedRect& b);

// Brute-force collision bounds: scan the other vehicle's entire arc domain in
// 1 cm steps with the clipping test, then bisect both edges. No windowing,
// no analytic shortcuts.
CollisionBounds swept_bounds_full(const Track& track, double own_s, Side own_side);

struct PosteriorMoments {
  double mu = 0.0;
  double sigma = 0.0;
};

// Numerical posterior of one belief point: midpoint-rule integration of
// prior x likelihood over a grid spanning both factors.
PosteriorMoments grid_posterior(const BeliefParams& p, const BeliefPoint& prior,
                                double lead, double observed_v,
                                double other_current_s, std::size_t cells = 100000);

// Monte Carlo estimate of the probability that the other vehicle's sampled
// position geometrically overlaps the own body. Sampling is split into
// fixed-size chunks with per-chunk seeds, so the parallel and serial results
// are bitwise identical.
double mc_collision_probability(const Track& track, double own_planned_s,
                                Side own_side, const BeliefPoint& point,
                                std::uint64_t seed, std::size_t samples = 1000000,
                                bool parallel = false);

struct DpSolution {
  double value = 0.0;           // backward-induction estimate of the optimum
  double extracted_cost = 0.0;  // cost of the greedily extracted input sequence
  std::vector<double> inputs;
  std::vector<double> velocities;  // post-step velocities along the extraction
};

// Discretized dynamic program over a velocity grid for the unconstrained
// tracking cost; the benchmark for planner optimality.
DpSolution dp_min_cost(const DynamicsParams& dyn, double v_desired,
                       const VehicleState& x0, int steps, double dv = 0.005,
                       double da = 0.025);

struct VerifyReport {
  bool pass = false;
  std::string summary;
};

// Linearized and exact bounds against the brute-force sweep, plus exactness
// in the shared-lane region.
VerifyReport verify_bounds(bool parallel = true);
// Conjugate update against grid integration on randomized instances.
VerifyReport verify_posterior(std::uint64_t seed = 0x5eedbe11ULL);
// Analytic collision probability against Monte Carlo on randomized instances.
VerifyReport verify_risk(std::uint64_t seed = 0x5eedc0deULL, bool parallel = true);

}  // namespace oracles
}  // namespace cei
