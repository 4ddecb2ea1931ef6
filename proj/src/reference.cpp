#include "sarcs/reference.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "sarcs/errors.hpp"
#include "sarcs/fft.hpp"
#include "sarcs/rng.hpp"

namespace sarcs::reference {
namespace {

using cd = std::complex<double>;

struct PointSource {
  double azimuth;
  double range;
  cd amp;
};

std::vector<PointSource> collect_sources(const Scene& scene,
                                         const RadarParams& p) {
  std::vector<PointSource> out;
  for (const auto& s : scene.scatterers)
    out.push_back({s.azimuth_pos, s.range_pos, std::polar(s.amplitude, s.phase)});
  if (scene.reflectivity_grid) {
    const auto& g = *scene.reflectivity_grid;
    for (std::size_t r = 0; r < g.values.rows(); ++r)
      for (std::size_t c = 0; c < g.values.cols(); ++c) {
        const cd v = g.values(r, c);
        if (v == cd(0.0, 0.0)) continue;
        out.push_back({g.azimuth_origin + static_cast<double>(c) * g.azimuth_spacing,
                       p.center_range + g.range_origin +
                           static_cast<double>(r) * g.range_spacing,
                       v});
      }
  }
  return out;
}

}  // namespace

PhaseHistory simulate_phase_history(const Scene& scene,
                                    const RadarParams& params,
                                    double noise_sigma, std::uint64_t seed) {
  params.validate();
  const std::vector<PointSource> sources = collect_sources(scene, params);

  PhaseHistory ph;
  ph.params = params;
  ph.samples = GridC(params.num_range_samples, params.num_pulses);

  const double fs = params.range_sample_rate;
  const double half_aperture = params.aperture_length() / 2.0;
  const double phase_scale = -4.0 * M_PI / params.wavelength;
  const std::size_t nr = params.num_range_samples;

  for (std::size_t m = 0; m < params.num_pulses; ++m) {
    const double eta = params.slow_time(m);
    const double x_plat = params.platform_velocity * eta;
    for (const auto& src : sources) {
      const double dx = x_plat - src.azimuth;
      if (std::abs(dx) > half_aperture) continue;
      const double range = std::hypot(src.range, dx);
      const double delay = 2.0 * range / kSpeedOfLight;
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
        ph.samples(static_cast<std::size_t>(k), m) +=
            src.amp * std::polar(1.0, chirp_phase + target_phase);
      }
    }
    if (noise_sigma > 0.0) {
      Rng rng(derive_seed(seed, m));
      for (std::size_t k = 0; k < nr; ++k)
        ph.samples(k, m) += rng.circular_gaussian(noise_sigma);
    }
  }
  return ph;
}

PhaseHistory apply_mask(const PhaseHistory& ph, const SamplingMask& mask,
                        double noise_floor_sigma, std::uint64_t seed) {
  require(ph.samples.rows() == mask.keep.rows() &&
              ph.samples.cols() == mask.keep.cols(),
          ErrorKind::Data, "mask dimensions do not match phase history");
  PhaseHistory out;
  out.params = ph.params;
  out.samples = GridC(ph.samples.rows(), ph.samples.cols());
  for (std::size_t c = 0; c < ph.samples.cols(); ++c) {
    Rng rng(derive_seed(seed, c));
    for (std::size_t r = 0; r < ph.samples.rows(); ++r) {
      if (mask.keep(r, c)) {
        out.samples(r, c) = ph.samples(r, c);
      } else if (noise_floor_sigma > 0.0) {
        out.samples(r, c) = rng.circular_gaussian(noise_floor_sigma);
      }
    }
  }
  return out;
}

ComplexImage focus_backprojection(const PhaseHistory& ph,
                                  std::size_t grid_rows,
                                  std::size_t grid_cols) {
  const RadarParams& p = ph.params;
  const std::size_t nr = ph.samples.rows(), np = ph.samples.cols();
  require(grid_rows > 0 && grid_rows <= nr && grid_cols > 0 && grid_cols <= np,
          ErrorKind::Usage, "grid outside swath");

  GridC rc = ph.samples;
  {
    // Same compression path as the parallel focuser.
    std::vector<cd> spec(nr);
    for (std::size_t k = 0; k < nr; ++k)
      spec[k] = chirp_sample(p, static_cast<double>(k) / p.range_sample_rate);
    fft::forward(spec.data(), nr);
    const auto len = static_cast<std::size_t>(std::max<long long>(
        1, std::llround(std::ceil(p.pulse_duration * p.range_sample_rate - 1e-9))));
    const double scale = 1.0 / static_cast<double>(len);
    std::vector<cd> buf(nr);
    for (std::size_t c = 0; c < np; ++c) {
      for (std::size_t r = 0; r < nr; ++r) buf[r] = rc(r, c);
      fft::forward(buf.data(), nr);
      for (std::size_t r = 0; r < nr; ++r) buf[r] *= std::conj(spec[r]) * scale;
      fft::inverse(buf.data(), nr);
      for (std::size_t r = 0; r < nr; ++r) rc(r, c) = buf[r];
    }
  }

  ComplexImage out;
  out.pixels = GridC(grid_rows, grid_cols);
  out.azimuth_spacing = p.azimuth_bin();
  out.range_spacing = p.range_bin();

  const double fs = p.range_sample_rate;
  const double half_aperture = p.aperture_length() / 2.0;
  const double phase_scale = 4.0 * M_PI / p.wavelength;

  for (std::size_t gr = 0; gr < grid_rows; ++gr) {
    const double r_pix = static_cast<double>(gr) * out.range_spacing;
    for (std::size_t gc = 0; gc < grid_cols; ++gc) {
      const double x_pix = (static_cast<double>(gc) -
                            static_cast<double>(grid_cols) / 2.0) *
                           out.azimuth_spacing;
      cd acc{0.0, 0.0};
      std::size_t used = 0;
      for (std::size_t m = 0; m < np; ++m) {
        const double dx = p.platform_velocity * p.slow_time(m) - x_pix;
        if (std::abs(dx) > half_aperture) continue;
        const double range = std::hypot(r_pix, dx);
        const double s = 2.0 * range / kSpeedOfLight * fs;
        const auto k = static_cast<std::ptrdiff_t>(std::floor(s));
        if (k < 0 || k + 1 >= static_cast<std::ptrdiff_t>(nr)) continue;
        const double frac = s - static_cast<double>(k);
        const cd v = rc(static_cast<std::size_t>(k), m) * (1.0 - frac) +
                     rc(static_cast<std::size_t>(k) + 1, m) * frac;
        acc += v * std::polar(1.0, phase_scale * range);
        ++used;
      }
      if (used > 0) acc /= static_cast<double>(used);
      out.pixels(gr, gc) = acc;
    }
  }
  return out;
}

IntensityImage multilook(const ComplexImage& img, std::size_t looks_azimuth,
                         std::size_t looks_range) {
  require(looks_azimuth >= 1 && looks_range >= 1, ErrorKind::Usage,
          "look counts must be at least 1");
  const std::size_t rows = img.pixels.rows(), cols = img.pixels.cols();
  require(looks_range <= rows && looks_azimuth <= cols, ErrorKind::Usage,
          "look counts exceed image dimensions");

  const std::size_t out_rows = (rows + looks_range - 1) / looks_range;
  const std::size_t out_cols = (cols + looks_azimuth - 1) / looks_azimuth;
  IntensityImage out;
  out.pixels = GridD(out_rows, out_cols);
  out.looks_azimuth = looks_azimuth;
  out.looks_range = looks_range;
  out.azimuth_spacing = img.azimuth_spacing * static_cast<double>(looks_azimuth);
  out.range_spacing = img.range_spacing * static_cast<double>(looks_range);

  for (std::size_t br = 0; br < out_rows; ++br) {
    const std::size_t r0 = br * looks_range;
    const std::size_t r1 = std::min(rows, r0 + looks_range);
    for (std::size_t bc = 0; bc < out_cols; ++bc) {
      const std::size_t c0 = bc * looks_azimuth;
      const std::size_t c1 = std::min(cols, c0 + looks_azimuth);
      double sum = 0.0;
      for (std::size_t r = r0; r < r1; ++r)
        for (std::size_t c = c0; c < c1; ++c) sum += std::norm(img.pixels(r, c));
      out.pixels(br, bc) = sum / static_cast<double>((r1 - r0) * (c1 - c0));
    }
  }
  return out;
}

}  // namespace sarcs::reference
