#ifndef SARCS_RADAR_HPP
#define SARCS_RADAR_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sarcs/grid.hpp"

namespace sarcs {

inline constexpr double kSpeedOfLight = 299792458.0;

/// Stop-and-go broadside stripmap geometry.  The platform moves along the
/// azimuth axis at constant velocity; range is measured perpendicular to it.
struct RadarParams {
  double wavelength = 0.03;             // m
  double chirp_rate = 5.0e13;           // Hz/s
  double pulse_duration = 1.0e-6;       // s
  double range_sample_rate = 6.0e7;     // Hz
  double prf = 240.0;                   // Hz
  double platform_velocity = 60.0;      // m/s
  double center_range = 300.0;          // m
  double synthetic_aperture_time = 0.15;  // s
  std::size_t num_range_samples = 256;
  std::size_t num_pulses = 256;

  /// Slow time of pulse m, zero at the middle of the acquisition.
  double slow_time(std::size_t pulse) const {
    return (static_cast<double>(pulse) -
            static_cast<double>(num_pulses) / 2.0) /
           prf;
  }

  double range_bin() const { return kSpeedOfLight / (2.0 * range_sample_rate); }
  double azimuth_bin() const { return platform_velocity / prf; }
  double fast_time_window() const {
    return static_cast<double>(num_range_samples) / range_sample_rate;
  }
  double aperture_length() const {
    return platform_velocity * synthetic_aperture_time;
  }
  double chirp_bandwidth() const { return chirp_rate * pulse_duration; }

  /// Throws Usage on non-positive or inconsistent parameters.
  void validate() const;
};

struct Scatterer {
  double azimuth_pos = 0.0;  // m along the track, zero at mid-acquisition
  double range_pos = 0.0;    // m, absolute slant range at closest approach
  double amplitude = 1.0;
  double phase = 0.0;        // rad
};

/// Dense complex reflectivity laid over a regular grid of point cells.
/// Origins are offsets of cell (0,0) from (azimuth 0, center_range).
struct ReflectivityGrid {
  GridC values;
  double azimuth_spacing = 1.0;  // m, column pitch
  double range_spacing = 1.0;    // m, row pitch
  double azimuth_origin = 0.0;
  double range_origin = 0.0;
};

struct Scene {
  std::vector<Scatterer> scatterers;
  std::optional<ReflectivityGrid> reflectivity_grid;
};

/// Raw echo matrix: rows index range fast time (starting at zero delay),
/// columns index azimuth pulses.
struct PhaseHistory {
  GridC samples;
  RadarParams params;
};

/// Simulates the echo of every scatterer (and reflectivity cell) plus
/// circular Gaussian thermal noise of the given standard deviation.
/// Deterministic for a fixed seed independent of thread count.
PhaseHistory simulate_phase_history(const Scene& scene,
                                    const RadarParams& params,
                                    double noise_sigma, std::uint64_t seed);

/// Baseband chirp replica at fast time u measured from the pulse start;
/// zero outside [0, pulse_duration).  Quadratic phase centred mid-pulse.
std::complex<double> chirp_sample(const RadarParams& p, double u);

/// Fully developed speckle patch: one unit-mean-intensity circular Gaussian
/// reflector per grid cell, centred on (azimuth 0, range offset 0).
Scene simulate_speckle_scene(double azimuth_extent, double range_extent,
                             double cell_spacing, std::uint64_t seed);

RadarParams load_radar_params(const std::string& path);
void save_radar_params(const RadarParams& p, const std::string& path);
Scene load_scene(const std::string& path);
void save_scene(const Scene& s, const std::string& path);

}  // namespace sarcs

#endif
