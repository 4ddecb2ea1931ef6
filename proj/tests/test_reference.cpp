#include <cstddef>

#include "doctest.h"
#include "sarcs/focusing.hpp"
#include "sarcs/radar.hpp"
#include "sarcs/reference.hpp"
#include "sarcs/sampling.hpp"

using namespace sarcs;

namespace {

RadarParams small_params() {
  RadarParams p;
  p.wavelength = 0.03;
  p.chirp_rate = 5.0e13;
  p.pulse_duration = 1.0e-6;
  p.range_sample_rate = 6.0e7;
  p.prf = 240.0;
  p.platform_velocity = 60.0;
  p.center_range = 120.0;
  p.synthetic_aperture_time = 0.1;
  p.num_range_samples = 128;
  p.num_pulses = 48;
  return p;
}

Scene small_scene() {
  Scene scene;
  scene.scatterers.push_back({0.0, 120.0, 1.0, 0.0});
  scene.scatterers.push_back({1.5, 115.0, 0.7, 0.9});
  scene.scatterers.push_back({-2.0, 127.5, 1.3, 2.1});
  return scene;
}

}  // namespace

// The parallel kernels split work across columns (pixels for the
// backprojector) without changing any per-element accumulation order, so
// the single-threaded references must agree bit for bit regardless of the
// OpenMP thread count this suite happens to run with.
TEST_SUITE("reference") {
  TEST_CASE("simulate_phase_history matches the serial reference bitwise") {
    const RadarParams p = small_params();
    const Scene scene = small_scene();
    const PhaseHistory par = simulate_phase_history(scene, p, 0.5, 31);
    const PhaseHistory ser = reference::simulate_phase_history(scene, p, 0.5, 31);
    CHECK(par.samples == ser.samples);
  }

  TEST_CASE("apply_mask matches the serial reference bitwise") {
    const RadarParams p = small_params();
    const PhaseHistory ph = simulate_phase_history(small_scene(), p, 0.2, 7);
    const SamplingMask mask = build_mask(MaskPattern::RandomAzimuth, 0.5, 1.0,
                                         ph.samples.rows(), ph.samples.cols(),
                                         13);
    const PhaseHistory par = apply_mask(ph, mask, 1.5, 17);
    const PhaseHistory ser = reference::apply_mask(ph, mask, 1.5, 17);
    CHECK(par.samples == ser.samples);
  }

  TEST_CASE("focus_backprojection matches the serial reference bitwise") {
    const RadarParams p = small_params();
    const PhaseHistory ph = simulate_phase_history(small_scene(), p, 0.0, 3);
    const ComplexImage par = focus_backprojection(ph, 128, 48);
    const ComplexImage ser = reference::focus_backprojection(ph, 128, 48);
    CHECK(par.pixels == ser.pixels);
    CHECK(par.azimuth_spacing == ser.azimuth_spacing);
    CHECK(par.range_spacing == ser.range_spacing);
  }

  TEST_CASE("multilook matches the serial reference bitwise") {
    const RadarParams p = small_params();
    const PhaseHistory ph = simulate_phase_history(small_scene(), p, 0.1, 5);
    const ComplexImage img = focus_rma(ph);
    const IntensityImage par = multilook(img, 5, 3);
    const IntensityImage ser = reference::multilook(img, 5, 3);
    CHECK(par.pixels == ser.pixels);
    CHECK(par.looks_azimuth == ser.looks_azimuth);
    CHECK(par.looks_range == ser.looks_range);
  }
}
