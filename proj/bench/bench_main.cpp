// Compares the OpenMP-parallel kernels against their serial reference paths.
// Both paths are required to produce identical results; the timing table below
// only reports throughput. On a single-core host the speedups sit near 1.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cei/oracles.hpp"
#include "cei/sweep.hpp"
#include "cei/track.hpp"

namespace {

double time_once(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double best_of(int reps, const std::function<void()>& fn) {
  double best = time_once(fn);
  for (int i = 1; i < reps; ++i) best = std::min(best, time_once(fn));
  return best;
}

void row(const char* name, double serial_s, double parallel_s) {
  std::printf("%-28s %10.3f s %10.3f s %8.2fx\n", name, serial_s, parallel_s,
              serial_s / parallel_s);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not available; both columns run the serial path\n");
#endif
  std::printf("%-28s %12s %12s %9s\n", "kernel", "serial", "parallel", "speedup");

  {
    cei::Track::Options serial_opt;
    serial_opt.parallel_table_build = false;
    cei::Track::Options parallel_opt;
    const double ts = best_of(3, [&] { cei::Track t({}, serial_opt); (void)t; });
    const double tp = best_of(3, [&] { cei::Track t({}, parallel_opt); (void)t; });
    row("bounds table build", ts, tp);
  }

  {
    const cei::Track track{cei::TrackGeometry{}};
    cei::BeliefPoint pt;
    pt.mu = 52.0;
    pt.sigma = 2.0;
    double ps = 0.0, pp = 0.0;
    const double ts = best_of(3, [&] {
      ps = cei::oracles::mc_collision_probability(track, 51.0, cei::Side::kLeft, pt,
                                                  42, 1000000, false);
    });
    const double tp = best_of(3, [&] {
      pp = cei::oracles::mc_collision_probability(track, 51.0, cei::Side::kLeft, pt,
                                                  42, 1000000, true);
    });
    row("Monte Carlo risk (1e6)", ts, tp);
    if (ps != pp) {
      std::printf("MISMATCH: serial %.9f vs parallel %.9f\n", ps, pp);
      return 1;
    }
  }

  {
    const std::vector<double> velocities = {8.0, 10.0, 12.0};
    const double ts = best_of(1, [&] { cei::run_gap_sweep(velocities, false); });
    const double tp = best_of(1, [&] { cei::run_gap_sweep(velocities, true); });
    row("gap sweep (3 runs)", ts, tp);
  }

  {
    const double ts = best_of(1, [&] { cei::oracles::verify_bounds(false); });
    const double tp = best_of(1, [&] { cei::oracles::verify_bounds(true); });
    row("bounds oracle scan", ts, tp);
  }

  return 0;
}
