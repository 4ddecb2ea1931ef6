#include "sarcs/radar.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "sarcs/errors.hpp"
#include "sarcs/fsio.hpp"
#include "sarcs/rng.hpp"

namespace sarcs {

void RadarParams::validate() const {
  require(wavelength > 0.0, ErrorKind::Usage, "wavelength must be positive");
  require(chirp_rate > 0.0, ErrorKind::Usage, "chirp_rate must be positive");
  require(pulse_duration > 0.0, ErrorKind::Usage, "pulse_duration must be positive");
  require(range_sample_rate > 0.0, ErrorKind::Usage, "range_sample_rate must be positive");
  require(prf > 0.0, ErrorKind::Usage, "prf must be positive");
  require(platform_velocity > 0.0, ErrorKind::Usage, "platform_velocity must be positive");
  require(center_range > 0.0, ErrorKind::Usage, "center_range must be positive");
  require(synthetic_aperture_time > 0.0, ErrorKind::Usage,
          "synthetic_aperture_time must be positive");
  require(num_range_samples > 0, ErrorKind::Usage, "num_range_samples must be positive");
  require(num_pulses >= 2, ErrorKind::Usage, "num_pulses must be at least 2");
  require(range_sample_rate > std::abs(chirp_rate) * pulse_duration,
          ErrorKind::Usage, "range_sample_rate below chirp bandwidth (Nyquist)");
}

namespace {

struct PointSource {
  double azimuth;
  double range;
  std::complex<double> amp;
};

// Flattens scatterers plus reflectivity cells into one source list and
// checks each against the sampled swath.
std::vector<PointSource> collect_sources(const Scene& scene,
                                         const RadarParams& p) {
  std::vector<PointSource> out;
  out.reserve(scene.scatterers.size());
  const double window = p.fast_time_window();
  const double half_aperture = p.aperture_length() / 2.0;
  auto add = [&](double az, double rng_abs, std::complex<double> amp) {
    require(std::isfinite(amp.real()) && std::isfinite(amp.imag()),
            ErrorKind::Data,
            "non-finite amplitude at azimuth " + std::to_string(az) +
                " range " + std::to_string(rng_abs));
    require(rng_abs > 0.0, ErrorKind::Data,
            "non-positive range at azimuth " + std::to_string(az));
    const double r_max = std::hypot(rng_abs, half_aperture);
    const double delay_end = 2.0 * r_max / kSpeedOfLight + p.pulse_duration;
    require(delay_end <= window, ErrorKind::Data,
            "scatterer outside swath at azimuth " + std::to_string(az) +
                " range " + std::to_string(rng_abs) + " (echo ends at " +
                std::to_string(delay_end) + " s, window " +
                std::to_string(window) + " s)");
    out.push_back({az, rng_abs, amp});
  };
  for (const auto& s : scene.scatterers) {
    require(std::isfinite(s.amplitude) && s.amplitude >= 0.0, ErrorKind::Data,
            "scatterer amplitude must be finite and nonnegative");
    add(s.azimuth_pos, s.range_pos, std::polar(s.amplitude, s.phase));
  }
  if (scene.reflectivity_grid) {
    const auto& g = *scene.reflectivity_grid;
    for (std::size_t r = 0; r < g.values.rows(); ++r)
      for (std::size_t c = 0; c < g.values.cols(); ++c) {
        const std::complex<double> v = g.values(r, c);
        if (v == std::complex<double>(0.0, 0.0)) continue;
        add(g.azimuth_origin + static_cast<double>(c) * g.azimuth_spacing,
            p.center_range + g.range_origin +
                static_cast<double>(r) * g.range_spacing,
            v);
      }
  }
  return out;
}

}  // namespace

PhaseHistory simulate_phase_history(const Scene& scene,
                                    const RadarParams& params,
                                    double noise_sigma, std::uint64_t seed) {
  params.validate();
  require(noise_sigma >= 0.0, ErrorKind::Usage, "noise sigma must be nonnegative");
  const std::vector<PointSource> sources = collect_sources(scene, params);

  PhaseHistory ph;
  ph.params = params;
  ph.samples = GridC(params.num_range_samples, params.num_pulses);

  const double fs = params.range_sample_rate;
  const double half_aperture = params.aperture_length() / 2.0;
  const double phase_scale = -4.0 * M_PI / params.wavelength;
  const std::size_t nr = params.num_range_samples;
  const std::ptrdiff_t np = static_cast<std::ptrdiff_t>(params.num_pulses);

  // Columns are independent; source order inside a column is fixed, so the
  // result is bitwise identical for any thread count.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < np; ++m) {
    const double eta = params.slow_time(static_cast<std::size_t>(m));
    const double x_plat = params.platform_velocity * eta;
    for (const auto& src : sources) {
      const double dx = x_plat - src.azimuth;
      if (std::abs(dx) > half_aperture) continue;
      const double range = std::hypot(src.range, dx);
      const double delay = 2.0 * range / kSpeedOfLight;
      // Chirp support [delay, delay + pulse_duration); the 1e-6-sample slack
      // keeps an exact-integer start bin inside the support despite round-off.
      const double start = delay * fs;
      auto k0 = static_cast<std::ptrdiff_t>(std::ceil(start - 1e-6));
      auto k1 = static_cast<std::ptrdiff_t>(
          std::ceil(start + params.pulse_duration * fs - 1e-6));
      if (k0 < 0) k0 = 0;
      if (k1 > static_cast<std::ptrdiff_t>(nr)) k1 = static_cast<std::ptrdiff_t>(nr);
      const double target_phase = phase_scale * range;
      for (std::ptrdiff_t k = k0; k < k1; ++k) {
        const double u = static_cast<double>(k) / fs - delay -
                         params.pulse_duration / 2.0;
        const double chirp_phase = M_PI * params.chirp_rate * u * u;
        ph.samples(static_cast<std::size_t>(k), static_cast<std::size_t>(m)) +=
            src.amp * std::polar(1.0, chirp_phase + target_phase);
      }
    }
    if (noise_sigma > 0.0) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(m)));
      for (std::size_t k = 0; k < nr; ++k)
        ph.samples(k, static_cast<std::size_t>(m)) +=
            rng.circular_gaussian(noise_sigma);
    }
  }
  return ph;
}

std::complex<double> chirp_sample(const RadarParams& p, double u) {
  if (u < 0.0 || u >= p.pulse_duration) return {0.0, 0.0};
  const double uc = u - p.pulse_duration / 2.0;
  return std::polar(1.0, M_PI * p.chirp_rate * uc * uc);
}

Scene simulate_speckle_scene(double azimuth_extent, double range_extent,
                             double cell_spacing, std::uint64_t seed) {
  require(cell_spacing > 0.0, ErrorKind::Usage, "cell spacing must be positive");
  require(azimuth_extent >= cell_spacing && range_extent >= cell_spacing,
          ErrorKind::Usage, "extents must be at least one cell spacing");
  const auto n_az = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(azimuth_extent / cell_spacing)));
  const auto n_rg = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(range_extent / cell_spacing)));

  ReflectivityGrid g;
  g.values = GridC(n_rg, n_az);
  g.azimuth_spacing = cell_spacing;
  g.range_spacing = cell_spacing;
  g.azimuth_origin = -cell_spacing * static_cast<double>(n_az - 1) / 2.0;
  g.range_origin = -cell_spacing * static_cast<double>(n_rg - 1) / 2.0;

  Rng rng(seed);
  for (std::size_t r = 0; r < n_rg; ++r)
    for (std::size_t c = 0; c < n_az; ++c)
      g.values(r, c) = rng.circular_gaussian(1.0);

  Scene scene;
  scene.reflectivity_grid = std::move(g);
  return scene;
}

namespace {

nlohmann::json parse_config_json(const std::string& path) {
  const std::string text = read_file(path, ErrorKind::Usage);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Usage, path + ": " + e.what());
  }
}

double need_number(const nlohmann::json& j, const char* key,
                   const std::string& path) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw Error(ErrorKind::Usage,
                path + ": missing or non-numeric field \"" + std::string(key) + "\"");
  return j.at(key).get<double>();
}

}  // namespace

RadarParams load_radar_params(const std::string& path) {
  const nlohmann::json j = parse_config_json(path);
  RadarParams p;
  p.wavelength = need_number(j, "wavelength", path);
  p.chirp_rate = need_number(j, "chirp_rate", path);
  p.pulse_duration = need_number(j, "pulse_duration", path);
  p.range_sample_rate = need_number(j, "range_sample_rate", path);
  p.prf = need_number(j, "prf", path);
  p.platform_velocity = need_number(j, "platform_velocity", path);
  p.center_range = need_number(j, "center_range", path);
  p.synthetic_aperture_time = need_number(j, "synthetic_aperture_time", path);
  p.num_range_samples = static_cast<std::size_t>(need_number(j, "num_range_samples", path));
  p.num_pulses = static_cast<std::size_t>(need_number(j, "num_pulses", path));
  p.validate();
  return p;
}

void save_radar_params(const RadarParams& p, const std::string& path) {
  nlohmann::json j{{"wavelength", p.wavelength},
                   {"chirp_rate", p.chirp_rate},
                   {"pulse_duration", p.pulse_duration},
                   {"range_sample_rate", p.range_sample_rate},
                   {"prf", p.prf},
                   {"platform_velocity", p.platform_velocity},
                   {"center_range", p.center_range},
                   {"synthetic_aperture_time", p.synthetic_aperture_time},
                   {"num_range_samples", p.num_range_samples},
                   {"num_pulses", p.num_pulses}};
  write_file_atomic(path, j.dump(2) + "\n");
}

Scene load_scene(const std::string& path) {
  const nlohmann::json j = parse_config_json(path);
  Scene scene;
  if (j.contains("scatterers")) {
    for (const auto& s : j.at("scatterers")) {
      Scatterer sc;
      sc.azimuth_pos = need_number(s, "azimuth_pos", path);
      sc.range_pos = need_number(s, "range_pos", path);
      sc.amplitude = s.value("amplitude", 1.0);
      sc.phase = s.value("phase", 0.0);
      scene.scatterers.push_back(sc);
    }
  }
  if (j.contains("speckle")) {
    const auto& sp = j.at("speckle");
    Scene speckle = simulate_speckle_scene(
        need_number(sp, "azimuth_extent", path),
        need_number(sp, "range_extent", path),
        need_number(sp, "cell_spacing", path),
        static_cast<std::uint64_t>(sp.value("seed", 0.0)));
    scene.reflectivity_grid = std::move(speckle.reflectivity_grid);
  } else if (j.contains("reflectivity_grid")) {
    const auto& rg = j.at("reflectivity_grid");
    ReflectivityGrid g;
    const auto rows = static_cast<std::size_t>(need_number(rg, "rows", path));
    const auto cols = static_cast<std::size_t>(need_number(rg, "cols", path));
    g.azimuth_spacing = need_number(rg, "azimuth_spacing", path);
    g.range_spacing = need_number(rg, "range_spacing", path);
    g.azimuth_origin = rg.value("azimuth_origin", 0.0);
    g.range_origin = rg.value("range_origin", 0.0);
    const auto& vals = rg.at("values");
    require(vals.is_array() && vals.size() == 2 * rows * cols, ErrorKind::Usage,
            path + ": reflectivity values must hold rows*cols (re, im) pairs");
    g.values = GridC(rows, cols);
    for (std::size_t i = 0; i < rows * cols; ++i)
      g.values.storage()[i] = {vals.at(2 * i).get<double>(),
                               vals.at(2 * i + 1).get<double>()};
    scene.reflectivity_grid = std::move(g);
  }
  return scene;
}

void save_scene(const Scene& s, const std::string& path) {
  nlohmann::json j;
  j["scatterers"] = nlohmann::json::array();
  for (const auto& sc : s.scatterers)
    j["scatterers"].push_back({{"azimuth_pos", sc.azimuth_pos},
                               {"range_pos", sc.range_pos},
                               {"amplitude", sc.amplitude},
                               {"phase", sc.phase}});
  if (s.reflectivity_grid) {
    const auto& g = *s.reflectivity_grid;
    nlohmann::json vals = nlohmann::json::array();
    for (const auto& v : g.values.storage()) {
      vals.push_back(v.real());
      vals.push_back(v.imag());
    }
    j["reflectivity_grid"] = {
        {"rows", g.values.rows()},         {"cols", g.values.cols()},
        {"azimuth_spacing", g.azimuth_spacing}, {"range_spacing", g.range_spacing},
        {"azimuth_origin", g.azimuth_origin},   {"range_origin", g.range_origin},
        {"values", std::move(vals)}};
  }
  write_file_atomic(path, j.dump(2) + "\n");
}

}  // namespace sarcs
