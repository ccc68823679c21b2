#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cei/engine.hpp"
#include "cei/oracles.hpp"
#include "cei/plot.hpp"
#include "cei/scenario.hpp"
#include "cei/sweep.hpp"
#include "cei/trace_io.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name) out += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out.empty() ? std::string("scenario") : out;
}

// Accepts "6,8,10" or "6..14" or "6..14:2".
std::vector<double> parse_velocities(const std::string& spec) {
  std::vector<double> out;
  const auto range_pos = spec.find("..");
  if (range_pos != std::string::npos) {
    const std::string lo_s = spec.substr(0, range_pos);
    std::string rest = spec.substr(range_pos + 2);
    double step = 1.0;
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
      step = std::stod(rest.substr(colon + 1));
      rest = rest.substr(0, colon);
    }
    const double lo = std::stod(lo_s);
    const double hi = std::stod(rest);
    if (step <= 0.0 || hi < lo) throw std::runtime_error("bad velocity range: " + spec);
    for (double v = lo; v <= hi + 1e-9; v += step) out.push_back(v);
    return out;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::runtime_error("no velocities in: " + spec);
  return out;
}

cei::ScenarioConfig load_scenario(const std::string& ref, const std::string& base) {
  if (cei::is_preset(ref)) return cei::preset(ref);
  if (!std::filesystem::exists(ref)) {
    throw std::runtime_error("'" + ref + "' is neither a preset nor a config file");
  }
  const cei::ScenarioConfig base_cfg =
      base.empty() ? cei::ScenarioConfig{} : cei::preset(base);
  return cei::parse_config(slurp(ref), base_cfg);
}

int cmd_run(const std::string& ref, const std::string& base, const std::string& out_dir,
            bool plot, bool belief, bool parallel_agents, bool swap_order) {
  const cei::ScenarioConfig config = load_scenario(ref, base);

  cei::EngineOptions options;
  options.parallel_agents = parallel_agents;
  options.swap_agent_order = swap_order;
  options.record_belief = belief;

  const auto t0 = std::chrono::steady_clock::now();
  const cei::RunResult run = cei::run_scenario(config, options);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::filesystem::create_directories(out_dir);
  const std::string stem = (std::filesystem::path(out_dir) / sanitize(config.name)).string();
  cei::write_text_file(stem + "_trace.csv", cei::trace_csv(run.trace));
  cei::write_text_file(stem + "_outcome.json", cei::outcome_json(run.outcome));
  cei::write_text_file(stem + "_replans.csv", cei::replans_csv(run.replans));
  if (belief) cei::write_text_file(stem + "_belief.csv", cei::belief_csv(run.belief_trace));
  if (plot) cei::write_text_file(stem + "_panels.svg", cei::run_panels_svg(run, config));

  std::cout << cei::outcome_json(run.outcome);
  std::fprintf(stdout, "trace: %s_trace.csv (%zu rows), wall %.2f s\n", stem.c_str(),
               run.trace.size(), wall);
  return 0;
}

int cmd_sweep(const std::string& spec, const std::string& out_dir, bool serial) {
  const std::vector<double> velocities = parse_velocities(spec);
  const auto t0 = std::chrono::steady_clock::now();
  const cei::SweepResult sweep = cei::run_gap_sweep(velocities, !serial);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::filesystem::create_directories(out_dir);
  const std::string csv_path = (std::filesystem::path(out_dir) / "sweep.csv").string();
  cei::write_text_file(csv_path, cei::sweep_csv(sweep));
  cei::write_text_file((std::filesystem::path(out_dir) / "sweep.svg").string(),
                       cei::sweep_svg(sweep));

  std::cout << cei::sweep_csv(sweep);
  std::fprintf(stdout, "wall %.2f s\n", wall);
  return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, bool serial) {
  bool pass = true;
  auto show = [&](const cei::oracles::VerifyReport& rep) {
    std::cout << rep.summary;
    pass = pass && rep.pass;
  };
  if (suite == "bounds" || suite == "all") show(cei::oracles::verify_bounds(!serial));
  if (suite == "posterior" || suite == "all")
    show(seed ? cei::oracles::verify_posterior(seed) : cei::oracles::verify_posterior());
  if (suite == "risk" || suite == "all")
    show(seed ? cei::oracles::verify_risk(seed, !serial)
              : cei::oracles::verify_risk(0x5eedc0deULL, !serial));
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-driver interaction simulator"};
  app.require_subcommand(1);

  std::string scenario_ref, base_preset, out_dir = "out";
  bool plot = false, belief = false, parallel_agents = false, swap_order = false;
  auto* run = app.add_subcommand("run", "simulate one scenario and write its trace");
  run->add_option("scenario", scenario_ref, "preset name or config file path")->required();
  run->add_option("--base", base_preset, "preset supplying defaults for a config file");
  run->add_option("--out", out_dir, "output directory (default out)");
  run->add_flag("--plot", plot, "write the four-panel SVG");
  run->add_flag("--belief", belief, "write the belief-point trajectory CSV");
  run->add_flag("--parallel-agents", parallel_agents,
                "process the two drivers' updates concurrently");
  run->add_flag("--swap-order", swap_order,
                "process the right driver first (trace must not change)");

  std::string velocities = "6..14:2", sweep_out = "out";
  bool sweep_serial = false;
  auto* sweep = app.add_subcommand("sweep", "car-following gap sweep with linear fit");
  sweep->add_option("--velocities", velocities, "list 6,8,10 or range 6..14:2");
  sweep->add_option("--out", sweep_out, "output directory (default out)");
  sweep->add_flag("--serial", sweep_serial, "run the sweep on one thread");

  std::string suite;
  std::uint64_t seed = 0;
  bool verify_serial = false;
  auto* verify = app.add_subcommand("verify", "compare against brute-force oracles");
  verify->add_option("suite", suite, "bounds | posterior | risk | all")
      ->required()
      ->check(CLI::IsMember({"bounds", "posterior", "risk", "all"}));
  verify->add_option("--seed", seed, "override the pinned random seed");
  verify->add_flag("--serial", verify_serial, "disable parallel evaluation");

  auto* list = app.add_subcommand("list-scenarios", "print the built-in presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(scenario_ref, base_preset, out_dir, plot, belief, parallel_agents,
                     swap_order);
    if (sweep->parsed()) return cmd_sweep(velocities, sweep_out, sweep_serial);
    if (verify->parsed()) return cmd_verify(suite, seed, verify_serial);
    if (list->parsed()) {
      for (const std::string& name : cei::preset_names())
        std::cout << name << ": " << cei::preset_summary(name) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
