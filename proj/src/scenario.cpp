#include "cei/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace cei {

namespace {

ScenarioConfig merge_base() {
  ScenarioConfig c;
  c.track.kind = TrackKind::kMerge;
  c.track.start_separation = 25.0;
  c.track.leg_length = 50.0;
  return c;
}

DriverConfig driver(double rho_l, double rho_u, double v0, double vd, double x0) {
  DriverConfig d;
  d.rho_lower = rho_l;
  d.rho_upper = rho_u;
  d.v0 = v0;
  d.v_desired = vd;
  d.x0 = x0;
  return d;
}

}  // namespace

void validate(const ScenarioConfig& c) {
  const auto fail = [](const std::string& msg) { throw ConfigError(msg); };

  if (c.schema_version != 1) {
    fail("unsupported schema_version " + std::to_string(c.schema_version));
  }
  if (c.track.vehicle_length <= 0.0) fail("track.vehicle_length must be positive");
  if (c.track.vehicle_width <= 0.0) fail("track.vehicle_width must be positive");
  if (c.track.kind == TrackKind::kMerge) {
    if (c.track.start_separation <= 0.0) fail("track.start_separation must be positive");
    if (c.track.leg_length <= c.track.start_separation / 2.0) {
      fail("track.leg_length must exceed half of track.start_separation");
    }
  } else if (c.track.straight_length <= 0.0) {
    fail("track.straight_length must be positive");
  }
  if (c.dynamics.alpha < 0.0) fail("dynamics.alpha must be non-negative");
  if (c.dynamics.beta < 0.0) fail("dynamics.beta must be non-negative");
  if (c.dynamics.a_max <= 0.0) fail("dynamics.a_max must be positive");
  if (c.dynamics.dt <= 0.0) fail("dynamics.dt must be positive");
  if (c.belief.horizon <= 0.0) fail("belief.horizon must be positive");
  if (c.belief.point_rate <= 0.0) fail("belief.point_rate must be positive");
  if (c.belief.a_c <= 0.0) fail("belief.a_c must be positive");
  if (c.belief.init_a_max <= 0.0) fail("belief.init_a_max must be positive");
  if (c.time_cap <= 0.0) fail("sim.time_cap must be positive");

  for (const auto* side : {&c.left, &c.right}) {
    const char* name = side == &c.left ? "left" : "right";
    const auto key = [&](const char* k) { return std::string(name) + "." + k; };
    if (!(side->rho_lower > 0.0)) fail(key("rho_lower") + " must be positive");
    if (!(side->rho_upper > side->rho_lower)) {
      fail(key("rho_upper") + " must exceed " + key("rho_lower"));
    }
    if (side->rho_upper > 1.0) fail(key("rho_upper") + " must not exceed 1");
    if (side->tau < 0.0) fail(key("tau") + " must be non-negative");
    if (side->v0 < 0.0) fail(key("v0") + " must be non-negative");
    if (side->v_desired < 0.0) fail(key("v_desired") + " must be non-negative");
    if (side->x0 < 0.0 || side->x0 >= c.track.total_length()) {
      fail(key("x0") + " must lie inside the track");
    }
  }
}

std::vector<std::string> preset_names() {
  return {"A", "B", "C", "D", "car_following"};
}

bool is_preset(const std::string& name) {
  for (const auto& n : preset_names()) {
    if (n == name) return true;
  }
  return false;
}

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig c = merge_base();
  c.name = name;
  if (name == "A") {
    c.left = driver(0.2, 0.5, 10.0, 10.0, 0.0);
    c.right = driver(0.2, 0.5, 9.0, 9.0, 0.0);
  } else if (name == "B") {
    c.left = driver(0.2, 0.5, 10.0, 10.0, 0.0);
    c.right = driver(0.2, 0.5, 9.0, 9.0, 1.2);
  } else if (name == "C") {
    c.left = driver(0.2, 0.4, 10.0, 10.0, 0.0);
    c.right = driver(0.3, 0.6, 10.0, 10.0, 0.0);
  } else if (name == "D") {
    c.left = driver(0.3, 0.4, 10.0, 10.0, 0.0);
    c.right = driver(0.3, 0.6, 10.0, 10.0, 0.0);
  } else if (name == "car_following") {
    return gap_sweep_scenario(10.0);
  } else {
    throw ConfigError("unknown scenario preset '" + name + "'");
  }
  return c;
}

std::string preset_summary(const std::string& name) {
  if (name == "A") return "symmetric merge, left 10 m/s vs right 9 m/s";
  if (name == "B") return "as A with the right vehicle starting 1.2 m ahead";
  if (name == "C") return "equal speeds, risk-averse left vs risk-tolerant right";
  if (name == "D") return "as C but the left driver also settles for risk 0.3";
  if (name == "car_following") return "straight lane, follower 10 m/s behind a 9 m/s leader";
  throw ConfigError("unknown scenario preset '" + name + "'");
}

ScenarioConfig gap_sweep_scenario(double follower_velocity) {
  ScenarioConfig c;
  c.track.kind = TrackKind::kStraight;
  c.track.straight_length = 400.0;
  const double v = follower_velocity;
  const double leader_v = 0.9 * v;
  // One second of bumper-to-bumper gap; centers sit a body length further apart.
  const double leader_x0 = v * 1.0 + c.track.vehicle_length;
  c.left = driver(0.2, 0.5, v, v, 0.0);           // follower
  c.right = driver(0.2, 0.5, leader_v, leader_v, leader_x0);  // leader
  char buf[64];
  std::snprintf(buf, sizeof(buf), "car_following_v%g", v);
  c.name = follower_velocity == 10.0 ? "car_following" : buf;
  return c;
}

std::vector<ScenarioConfig> gap_sweep_protocol(const std::vector<double>& velocities) {
  std::vector<ScenarioConfig> out;
  out.reserve(velocities.size());
  for (const double v : velocities) out.push_back(gap_sweep_scenario(v));
  return out;
}

namespace {

struct Parser {
  ScenarioConfig config;
  std::string section;
  int line_no = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("line " + std::to_string(line_no) + ": " + msg);
  }

  double number(const std::string& value) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      while (used < value.size() && std::isspace(static_cast<unsigned char>(value[used]))) {
        ++used;
      }
      if (used != value.size()) fail("trailing characters after number '" + value + "'");
      return v;
    } catch (const std::invalid_argument&) {
      fail("expected a number, got '" + value + "'");
    } catch (const std::out_of_range&) {
      fail("number out of range: '" + value + "'");
    }
  }

  void apply(const std::string& key, const std::string& value) {
    if (section.empty()) {
      if (key == "schema_version") {
        config.schema_version = static_cast<int>(number(value));
        return;
      }
      if (key == "name") {
        config.name = value;
        return;
      }
      fail("unknown top-level key '" + key + "'");
    }
    if (section == "track") {
      if (key == "kind") {
        if (value == "merge") {
          config.track.kind = TrackKind::kMerge;
        } else if (value == "straight") {
          config.track.kind = TrackKind::kStraight;
        } else {
          fail("track.kind must be 'merge' or 'straight', got '" + value + "'");
        }
      } else if (key == "start_separation") {
        config.track.start_separation = number(value);
      } else if (key == "leg_length") {
        config.track.leg_length = number(value);
      } else if (key == "straight_length") {
        config.track.straight_length = number(value);
      } else if (key == "vehicle_length") {
        config.track.vehicle_length = number(value);
      } else if (key == "vehicle_width") {
        config.track.vehicle_width = number(value);
      } else {
        fail("unknown key 'track." + key + "'");
      }
      return;
    }
    if (section == "dynamics") {
      if (key == "alpha") {
        config.dynamics.alpha = number(value);
      } else if (key == "beta") {
        config.dynamics.beta = number(value);
      } else if (key == "a_max") {
        config.dynamics.a_max = number(value);
      } else if (key == "dt") {
        config.dynamics.dt = number(value);
      } else {
        fail("unknown key 'dynamics." + key + "'");
      }
      return;
    }
    if (section == "belief") {
      if (key == "horizon") {
        config.belief.horizon = number(value);
      } else if (key == "point_rate") {
        config.belief.point_rate = number(value);
      } else if (key == "a_c") {
        config.belief.a_c = number(value);
      } else if (key == "init_a_max") {
        config.belief.init_a_max = number(value);
      } else {
        fail("unknown key 'belief." + key + "'");
      }
      return;
    }
    if (section == "left" || section == "right") {
      DriverConfig& d = section == "left" ? config.left : config.right;
      if (key == "rho_lower") {
        d.rho_lower = number(value);
      } else if (key == "rho_upper") {
        d.rho_upper = number(value);
      } else if (key == "tau") {
        d.tau = number(value);
      } else if (key == "v0") {
        d.v0 = number(value);
      } else if (key == "v_desired") {
        d.v_desired = number(value);
      } else if (key == "x0") {
        d.x0 = number(value);
      } else {
        fail("unknown key '" + section + "." + key + "'");
      }
      return;
    }
    if (section == "sim") {
      if (key == "time_cap") {
        config.time_cap = number(value);
      } else {
        fail("unknown key 'sim." + key + "'");
      }
      return;
    }
    fail("unknown section '" + section + "'");
  }
};

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const ScenarioConfig& base) {
  Parser p;
  p.config = base;
  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++p.line_no;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = strip(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') p.fail("unterminated section header");
      p.section = strip(line.substr(1, line.size() - 2));
      if (p.section.empty()) p.fail("empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) p.fail("expected 'key = value', got '" + line + "'");
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key.empty()) p.fail("empty key");
    if (value.empty()) p.fail("empty value for key '" + key + "'");
    p.apply(key, value);
  }
  validate(p.config);
  return p.config;
}

std::string serialize_config(const ScenarioConfig& c) {
  char buf[256];
  std::ostringstream out;
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "schema_version = " << c.schema_version << "\n";
  out << "name = " << c.name << "\n\n";
  out << "[track]\n";
  out << "kind = " << (c.track.kind == TrackKind::kMerge ? "merge" : "straight") << "\n";
  if (c.track.kind == TrackKind::kMerge) {
    out << "start_separation = " << num(c.track.start_separation) << "\n";
    out << "leg_length = " << num(c.track.leg_length) << "\n";
  } else {
    out << "straight_length = " << num(c.track.straight_length) << "\n";
  }
  out << "vehicle_length = " << num(c.track.vehicle_length) << "\n";
  out << "vehicle_width = " << num(c.track.vehicle_width) << "\n\n";
  out << "[dynamics]\n";
  out << "alpha = " << num(c.dynamics.alpha) << "\n";
  out << "beta = " << num(c.dynamics.beta) << "\n";
  out << "a_max = " << num(c.dynamics.a_max) << "\n";
  out << "dt = " << num(c.dynamics.dt) << "\n\n";
  out << "[belief]\n";
  out << "horizon = " << num(c.belief.horizon) << "\n";
  out << "point_rate = " << num(c.belief.point_rate) << "\n";
  out << "a_c = " << num(c.belief.a_c) << "\n";
  out << "init_a_max = " << num(c.belief.init_a_max) << "\n\n";
  for (const auto* side : {&c.left, &c.right}) {
    out << "[" << (side == &c.left ? "left" : "right") << "]\n";
    out << "rho_lower = " << num(side->rho_lower) << "\n";
    out << "rho_upper = " << num(side->rho_upper) << "\n";
    out << "tau = " << num(side->tau) << "\n";
    out << "v0 = " << num(side->v0) << "\n";
    out << "v_desired = " << num(side->v_desired) << "\n";
    out << "x0 = " << num(side->x0) << "\n\n";
  }
  out << "[sim]\n";
  out << "time_cap = " << num(c.time_cap) << "\n";
  return out.str();
}

}  // namespace cei
