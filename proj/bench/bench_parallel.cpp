// Benchmark: serial reference vs OpenMP batch execution on the two
// instance-parallel workloads, a comparison sweep and a one-step scan.
// Verifies that the parallel runs reproduce the serial results exactly.
//
// Usage: projlab_bench [--cells N] [--samples N]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <omp.h>

#include "projlab/dynamics.hpp"
#include "projlab/io.hpp"
#include "projlab/parallel.hpp"
#include "projlab/scenarios.hpp"

using namespace projlab;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SweepSpec sweep_workload(int cells) {
  SweepSpec spec;
  spec.d = 24;
  spec.angle_sets = {{std::acos(0.6)},
                     {std::acos(0.8), std::acos(0.55)},
                     {0.0, std::acos(0.4), std::acos(0.2)}};
  spec.starts = {"A", "B", "mu_minus", "random"};
  spec.k_iters = 30;
  const int per_cell = static_cast<int>(spec.angle_sets.size() * spec.starts.size());
  const int seeds = std::max(1, cells / per_cell);
  for (int s = 0; s < seeds; ++s) spec.seeds.push_back(static_cast<std::uint64_t>(s + 1));
  return spec;
}

// MAP one-step scan: the workload behind the alternative-law verification.
std::vector<int> one_step_scan(int samples, int jobs) {
  std::vector<int> flags(static_cast<std::size_t>(samples));
  parallel_for(samples, jobs, [&](std::int64_t i) {
    const auto seed = static_cast<std::uint64_t>(i);
    const int d = 8 + static_cast<int>(seed % 8);
    const auto [a, b] = subspaces_with_angles(
        d, {std::acos(0.7), std::acos(0.3)}, mix_seed(seed, 42));
    const Vector x0 = random_unit_vector(d, mix_seed(seed, 43));
    const IterationTrace trace =
        run(Method::Map, x0, a, b, {.max_iter = 30, .floor = 1e-14, .record_directions = false});
    const bool one_step =
        trace.errors.size() > 1 && trace.errors[1] <= 1e-12 * trace.errors[0];
    flags[static_cast<std::size_t>(i)] = one_step ? 1 : 0;
  });
  return flags;
}

}  // namespace

int main(int argc, char** argv) {
  int cells = 240;
  int samples = 4000;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--cells") == 0 && i + 1 < argc) cells = std::atoi(argv[i + 1]);
    if (std::strcmp(argv[i], "--samples") == 0 && i + 1 < argc) samples = std::atoi(argv[i + 1]);
  }
  const int threads = omp_get_max_threads();
  std::printf("threads available: %d\n\n", threads);

  {
    const SweepSpec spec = sweep_workload(cells);
    const int total = static_cast<int>(spec.angle_sets.size() * spec.starts.size() *
                                       spec.seeds.size());
    auto t0 = std::chrono::steady_clock::now();
    const auto serial = sweep(spec, 1);
    const double serial_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const auto parallel = sweep(spec, 0);
    const double parallel_s = seconds_since(t0);

    const bool identical = sweep_summary_csv(serial) == sweep_summary_csv(parallel);
    std::printf("sweep          %5d cells   serial %8.3fs   omp %8.3fs   speedup %.2fx   %s\n",
                total, serial_s, parallel_s, serial_s / parallel_s,
                identical ? "results identical" : "RESULTS DIFFER");
    if (!identical) return 1;
  }

  {
    auto t0 = std::chrono::steady_clock::now();
    const auto serial = one_step_scan(samples, 1);
    const double serial_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const auto parallel = one_step_scan(samples, 0);
    const double parallel_s = seconds_since(t0);

    const bool identical = serial == parallel;
    std::printf("one-step scan  %5d samples serial %8.3fs   omp %8.3fs   speedup %.2fx   %s\n",
                samples, serial_s, parallel_s, serial_s / parallel_s,
                identical ? "results identical" : "RESULTS DIFFER");
    if (!identical) return 1;
  }
  return 0;
}
