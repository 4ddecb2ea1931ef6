#include <cmath>
#include <complex>
#include <filesystem>

#include "doctest.h"
#include "sarcs/errors.hpp"
#include "sarcs/radar.hpp"

using namespace sarcs;

namespace {

RadarParams desk_params() {
  RadarParams p;
  p.wavelength = 0.03;
  p.chirp_rate = 5.0e13;
  p.pulse_duration = 1.0e-6;
  p.range_sample_rate = 6.0e7;
  p.prf = 240.0;
  p.platform_velocity = 60.0;
  p.center_range = 300.0;
  p.synthetic_aperture_time = 0.15;
  p.num_range_samples = 256;
  p.num_pulses = 256;
  return p;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / "sarcs_radar_test";
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("radar") {
  TEST_CASE("validate rejects bad parameters") {
    RadarParams p = desk_params();
    p.prf = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);

    p = desk_params();
    p.num_pulses = 1;
    CHECK_THROWS_AS(p.validate(), Error);

    // chirp bandwidth 50 MHz needs more than 50 MHz of sampling
    p = desk_params();
    p.range_sample_rate = 4.0e7;
    try {
      p.validate();
      FAIL("expected Nyquist rejection");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Usage);
    }
  }

  TEST_CASE("slow time is centred on the aperture") {
    const RadarParams p = desk_params();
    CHECK(p.slow_time(128) == 0.0);
    CHECK(p.slow_time(129) == doctest::Approx(1.0 / 240.0));
    CHECK(p.slow_time(0) == doctest::Approx(-128.0 / 240.0));
  }

  TEST_CASE("derived quantities") {
    const RadarParams p = desk_params();
    CHECK(p.range_bin() == doctest::Approx(kSpeedOfLight / 1.2e8));
    CHECK(p.azimuth_bin() == doctest::Approx(0.25));
    CHECK(p.chirp_bandwidth() == doctest::Approx(5.0e7));
    CHECK(p.aperture_length() == doctest::Approx(9.0));
  }

  TEST_CASE("chirp replica support and symmetry") {
    const RadarParams p = desk_params();
    CHECK(chirp_sample(p, -1e-9) == std::complex<double>(0.0, 0.0));
    CHECK(chirp_sample(p, 1.0e-6) == std::complex<double>(0.0, 0.0));
    CHECK(std::abs(chirp_sample(p, 3.0e-7)) == doctest::Approx(1.0));
    // quadratic phase around the pulse centre
    const auto a = chirp_sample(p, 5.0e-7 - 2.0e-7);
    const auto b = chirp_sample(p, 5.0e-7 + 2.0e-7);
    CHECK(std::abs(a - b) < 1e-12);
    // mid-pulse phase is zero
    CHECK(chirp_sample(p, 5.0e-7).real() == doctest::Approx(1.0));
    CHECK(chirp_sample(p, 5.0e-7).imag() == doctest::Approx(0.0));
  }

  TEST_CASE("round trip of params and scene files") {
    TempDir dir;
    RadarParams p = desk_params();
    p.center_range = 271.25;
    save_radar_params(p, dir.file("radar.json"));
    const RadarParams q = load_radar_params(dir.file("radar.json"));
    CHECK(q.center_range == p.center_range);
    CHECK(q.num_pulses == p.num_pulses);
    CHECK(q.chirp_rate == p.chirp_rate);

    Scene s;
    s.scatterers.push_back({1.5, 298.0, 0.7, 1.2});
    s.scatterers.push_back({-2.0, 305.0, 1.0, 0.0});
    save_scene(s, dir.file("scene.json"));
    const Scene t = load_scene(dir.file("scene.json"));
    REQUIRE(t.scatterers.size() == 2);
    CHECK(t.scatterers[0].azimuth_pos == 1.5);
    CHECK(t.scatterers[0].phase == 1.2);
    CHECK(t.scatterers[1].range_pos == 305.0);
  }
}

TEST_SUITE("simulate") {
  TEST_CASE("echo lands in the exact delay bins") {
    RadarParams p = desk_params();
    // delay * fs = 120 exactly, so the chirp occupies rows 120..179
    const double r0 = 120.0 * p.range_bin();
    p.center_range = r0;
    Scene scene;
    scene.scatterers.push_back({0.0, r0, 1.0, 0.0});
    const PhaseHistory ph = simulate_phase_history(scene, p, 0.0, 1);
    REQUIRE(ph.samples.rows() == 256);

    const std::size_t mid = 128;  // slow time zero
    CHECK(std::abs(ph.samples(119, mid)) == doctest::Approx(0.0));
    CHECK(std::abs(ph.samples(120, mid)) == doctest::Approx(1.0));
    CHECK(std::abs(ph.samples(150, mid)) == doctest::Approx(1.0));
    CHECK(std::abs(ph.samples(179, mid)) == doctest::Approx(1.0));
    CHECK(std::abs(ph.samples(180, mid)) == doctest::Approx(0.0));

    // row 150 sits mid-chirp, so only the two-way phase remains
    const auto expect = std::polar(1.0, -4.0 * M_PI * r0 / p.wavelength);
    CHECK(ph.samples(150, mid).real() == doctest::Approx(expect.real()).epsilon(1e-9));
    CHECK(ph.samples(150, mid).imag() == doctest::Approx(expect.imag()).epsilon(1e-9));
  }

  TEST_CASE("aperture gating hides far pulses") {
    RadarParams p = desk_params();
    const double r0 = 120.0 * p.range_bin();
    Scene scene;
    scene.scatterers.push_back({0.0, r0, 1.0, 0.0});
    const PhaseHistory ph = simulate_phase_history(scene, p, 0.0, 1);
    // visibility within |v eta| <= 4.5 m, i.e. |m - 128| <= 18
    CHECK(std::abs(ph.samples(150, 128 - 17)) == doctest::Approx(1.0));
    CHECK(std::abs(ph.samples(150, 128 + 17)) == doctest::Approx(1.0));
    CHECK(std::abs(ph.samples(150, 100)) == doctest::Approx(0.0));
    CHECK(std::abs(ph.samples(150, 156)) == doctest::Approx(0.0));
  }

  TEST_CASE("superposition and amplitude scaling") {
    RadarParams p = desk_params();
    Scene a, b, both;
    a.scatterers.push_back({1.0, 299.0, 1.0, 0.3});
    b.scatterers.push_back({-2.0, 303.0, 0.6, 2.0});
    both.scatterers = {a.scatterers[0], b.scatterers[0]};

    const PhaseHistory ha = simulate_phase_history(a, p, 0.0, 1);
    const PhaseHistory hb = simulate_phase_history(b, p, 0.0, 1);
    const PhaseHistory hab = simulate_phase_history(both, p, 0.0, 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < hab.samples.size(); ++i)
      worst = std::max(worst, std::abs(hab.samples.storage()[i] -
                                       ha.samples.storage()[i] -
                                       hb.samples.storage()[i]));
    CHECK(worst < 1e-12);

    Scene doubled = a;
    doubled.scatterers[0].amplitude = 2.0;
    const PhaseHistory hd = simulate_phase_history(doubled, p, 0.0, 1);
    worst = 0.0;
    for (std::size_t i = 0; i < hd.samples.size(); ++i)
      worst = std::max(worst, std::abs(hd.samples.storage()[i] -
                                       2.0 * ha.samples.storage()[i]));
    CHECK(worst < 1e-12);
  }

  TEST_CASE("noise statistics and determinism") {
    RadarParams p = desk_params();
    p.num_range_samples = 64;
    p.num_pulses = 64;
    const Scene empty;
    const PhaseHistory h1 = simulate_phase_history(empty, p, 0.5, 99);
    const PhaseHistory h2 = simulate_phase_history(empty, p, 0.5, 99);
    CHECK(h1.samples == h2.samples);

    const PhaseHistory h3 = simulate_phase_history(empty, p, 0.5, 100);
    CHECK_FALSE(h1.samples == h3.samples);

    double power = 0.0;
    for (const auto& z : h1.samples.storage()) power += std::norm(z);
    power /= static_cast<double>(h1.samples.size());
    CHECK(power == doctest::Approx(0.25).epsilon(0.1));
  }

  TEST_CASE("scatterer outside the sampled swath is refused") {
    RadarParams p = desk_params();
    Scene scene;
    scene.scatterers.push_back({0.0, 5000.0, 1.0, 0.0});
    try {
      simulate_phase_history(scene, p, 0.0, 1);
      FAIL("expected swath rejection");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Data);
    }
  }

  TEST_CASE("speckle scene has unit mean intensity") {
    const Scene s = simulate_speckle_scene(20.0, 10.0, 0.5, 4);
    REQUIRE(s.reflectivity_grid.has_value());
    const auto& g = *s.reflectivity_grid;
    CHECK(g.values.cols() == 40);
    CHECK(g.values.rows() == 20);
    CHECK(g.azimuth_origin == doctest::Approx(-0.5 * 39.0 / 2.0));
    double mean = 0.0;
    for (const auto& z : g.values.storage()) mean += std::norm(z);
    mean /= static_cast<double>(g.values.size());
    CHECK(mean == doctest::Approx(1.0).epsilon(0.15));

    const Scene s2 = simulate_speckle_scene(20.0, 10.0, 0.5, 4);
    CHECK(s2.reflectivity_grid->values == g.values);
  }
}
