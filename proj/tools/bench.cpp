// Benchmark of the OpenMP kernels against their serial reference
// counterparts. Also verifies bitwise agreement, since the parallel
// loops are written to preserve the serial accumulation order.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sarcs/focusing.hpp"
#include "sarcs/pipeline.hpp"
#include "sarcs/radar.hpp"
#include "sarcs/reference.hpp"
#include "sarcs/sampling.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename F>
double time_best(int reps, F&& fn) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = Clock::now();
    fn();
    const double dt = seconds_since(t0);
    if (dt < best) best = dt;
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool equal) {
  std::printf("%-18s %10.3f ms %10.3f ms   %5.2fx   %s\n", name, serial * 1e3,
              parallel * 1e3, serial / parallel, equal ? "bitwise equal" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  int reps = 3;
  std::size_t size = 192;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--reps" && i + 1 < argc) reps = std::atoi(argv[++i]);
    else if (a == "--size" && i + 1 < argc) size = std::strtoull(argv[++i], nullptr, 10);
    else {
      std::fprintf(stderr, "usage: sarcs_bench [--reps N] [--size N]\n");
      return 1;
    }
  }

#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP: not enabled\n");
#endif

  sarcs::RadarParams params;
  params.num_range_samples = size;
  params.num_pulses = size;

  sarcs::SceneRecipe recipe;
  recipe.speckle_azimuth_extent = 6.0;
  recipe.speckle_range_extent = 6.0;
  recipe.speckle_cell_spacing = 0.5;
  recipe.point_count = 4;
  const sarcs::Scene scene = sarcs::generate_scene(recipe, 11, params.center_range);

  std::printf("%-18s %13s %13s %8s\n", "kernel", "serial", "openmp", "speedup");

  sarcs::PhaseHistory ph_par, ph_ser;
  {
    const double ts = time_best(reps, [&] {
      ph_ser = sarcs::reference::simulate_phase_history(scene, params, 0.05, 7);
    });
    const double tp = time_best(reps, [&] {
      ph_par = sarcs::simulate_phase_history(scene, params, 0.05, 7);
    });
    report("simulate", ts, tp, ph_ser.samples == ph_par.samples);
  }

  const sarcs::SamplingMask mask = sarcs::build_mask(
      sarcs::MaskPattern::RegularAzimuthRandomRange, 0.5, 0.5, size, size, 3);
  {
    sarcs::PhaseHistory a, b;
    const double ts = time_best(reps, [&] {
      a = sarcs::reference::apply_mask(ph_ser, mask, 0.02, 5);
    });
    const double tp = time_best(reps, [&] {
      b = sarcs::apply_mask(ph_par, mask, 0.02, 5);
    });
    report("apply_mask", ts, tp, a.samples == b.samples);
  }

  {
    sarcs::ComplexImage a, b;
    const std::size_t g = size / 2;
    const double ts = time_best(reps, [&] {
      a = sarcs::reference::focus_backprojection(ph_ser, g, g);
    });
    const double tp = time_best(reps, [&] {
      b = sarcs::focus_backprojection(ph_par, g, g);
    });
    report("backprojection", ts, tp, a.pixels == b.pixels);
  }

  {
    sarcs::ComplexImage img = sarcs::focus_rma(ph_par);
    sarcs::IntensityImage a, b;
    const double ts = time_best(reps, [&] {
      a = sarcs::reference::multilook(img, 4, 4);
    });
    const double tp = time_best(reps, [&] {
      b = sarcs::multilook(img, 4, 4);
    });
    report("multilook", ts, tp, a.pixels == b.pixels);
  }

  return 0;
}
