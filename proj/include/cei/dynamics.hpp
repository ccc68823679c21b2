#pragma once

#include <vector>

namespace cei {

struct DynamicsParams {
  double alpha = 0.0005;  // quadratic resistance coefficient, 1/m
  double beta = 0.1;      // constant resistance, m/s^2
  double a_max = 2.5;     // input magnitude bound, m/s^2
  double dt = 0.05;       // integration step, s
};

struct VehicleState {
  double s = 0.0;     // arc position of the body center, m
  double v = 0.0;     // velocity, m/s
  double a_in = 0.0;  // last applied (clipped) input, m/s^2
};

// Velocity-dependent resistance a_r(v) = alpha v^2 + beta.
double resistance(const DynamicsParams& p, double v);

// Input that holds the current velocity: the resistance itself, or zero when
// standing still (the non-negativity clamp already keeps v at zero).
double hold_input(const DynamicsParams& p, double v);

// One explicit Euler step. The input is clipped to [-a_max, a_max], the
// position advances with the pre-step velocity, and the velocity is clamped
// at zero (no reverse driving).
VehicleState step(const DynamicsParams& p, const VehicleState& x, double a_in);

// Forward simulation of an input sequence.
std::vector<VehicleState> rollout(const DynamicsParams& p, const VehicleState& x0,
                                  const std::vector<double>& inputs);

}  // namespace cei
