#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cei/belief.hpp"
#include "cei/dynamics.hpp"
#include "cei/track.hpp"

namespace cei {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct DriverConfig {
  double rho_lower = 0.2;
  double rho_upper = 0.5;
  double tau = 2.0;        // settling time before a lower re-plan, s
  double v0 = 10.0;        // initial velocity, m/s
  double v_desired = 10.0; // m/s
  double x0 = 0.0;         // initial arc position, m
};

struct ScenarioConfig {
  int schema_version = 1;
  std::string name = "custom";
  TrackGeometry track;
  DynamicsParams dynamics;
  BeliefParams belief;
  DriverConfig left;
  DriverConfig right;
  double time_cap = 60.0;  // simulated-time cap, s
};

// Throws ConfigError when any value is out of its admissible range.
void validate(const ScenarioConfig& config);

// Named presets. The merge presets differ only in thresholds and the right
// vehicle's start; car_following puts both vehicles on one straight lane with
// the slower one a second of headway ahead.
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
ScenarioConfig preset(const std::string& name);
std::string preset_summary(const std::string& name);

// Sectioned key = value text format. Unknown sections or keys are rejected
// with a diagnostic naming the offender; absent keys keep the base values.
ScenarioConfig parse_config(const std::string& text, const ScenarioConfig& base = {});
std::string serialize_config(const ScenarioConfig& config);

// Car-following protocol for a range of follower velocities: the leader runs
// 10% slower and starts one second of bumper-to-bumper gap ahead.
ScenarioConfig gap_sweep_scenario(double follower_velocity);
std::vector<ScenarioConfig> gap_sweep_protocol(const std::vector<double>& velocities);

}  // namespace cei
