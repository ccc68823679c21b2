#include "cei/dynamics.hpp"

#include <algorithm>
#include <stdexcept>

namespace cei {

double resistance(const DynamicsParams& p, double v) {
  if (v < 0.0) throw std::domain_error("resistance: negative velocity");
  return p.alpha * v * v + p.beta;
}

double hold_input(const DynamicsParams& p, double v) {
  if (v <= 0.0) return 0.0;
  return std::clamp(resistance(p, v), -p.a_max, p.a_max);
}

VehicleState step(const DynamicsParams& p, const VehicleState& x, double a_in) {
  const double a = std::clamp(a_in, -p.a_max, p.a_max);
  VehicleState out;
  out.a_in = a;
  out.s = x.s + x.v * p.dt;
  out.v = x.v + (a - resistance(p, x.v)) * p.dt;
  if (out.v < 0.0) out.v = 0.0;
  return out;
}

std::vector<VehicleState> rollout(const DynamicsParams& p, const VehicleState& x0,
                                  const std::vector<double>& inputs) {
  std::vector<VehicleState> states;
  states.reserve(inputs.size());
  VehicleState x = x0;
  for (const double a : inputs) {
    x = step(p, x, a);
    states.push_back(x);
  }
  return states;
}

}  // namespace cei
