#include "sarcs/focusing.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "sarcs/errors.hpp"
#include "sarcs/fft.hpp"

namespace sarcs {
namespace {

using cd = std::complex<double>;

// DFT of the chirp replica sampled on the fast-time grid, zero padded to n.
std::vector<cd> replica_spectrum(const RadarParams& p, std::size_t n) {
  std::vector<cd> spec(n, cd{0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k)
    spec[k] = chirp_sample(p, static_cast<double>(k) / p.range_sample_rate);
  fft::forward(spec.data(), n);
  return spec;
}

std::size_t replica_length(const RadarParams& p) {
  auto len = static_cast<std::size_t>(
      std::ceil(p.pulse_duration * p.range_sample_rate - 1e-9));
  return std::max<std::size_t>(1, len);
}

// Range compression in place: per-pulse FFT, multiply by the conjugate
// replica spectrum, inverse FFT.  Scaled so a perfectly aligned echo of
// unit amplitude compresses to magnitude 1.
void range_compress(GridC& g, const RadarParams& p) {
  const std::size_t rows = g.rows(), cols = g.cols();
  const std::vector<cd> spec = replica_spectrum(p, rows);
  const double scale = 1.0 / static_cast<double>(replica_length(p));
#pragma omp parallel
  {
    std::vector<cd> buf(rows);
#pragma omp for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(cols); ++c) {
      for (std::size_t r = 0; r < rows; ++r)
        buf[r] = g(r, static_cast<std::size_t>(c));
      fft::forward(buf.data(), rows);
      for (std::size_t r = 0; r < rows; ++r)
        buf[r] *= std::conj(spec[r]) * scale;
      fft::inverse(buf.data(), rows);
      for (std::size_t r = 0; r < rows; ++r)
        g(r, static_cast<std::size_t>(c)) = buf[r];
    }
  }
}

// Circular roll of rows by floor(rows/2), i.e. fftshift along the range
// frequency axis.  Self-inverse for even row counts; `inverse` selects the
// opposite roll for odd ones.
void shift_rows(GridC& g, bool inverse) {
  const std::size_t rows = g.rows(), cols = g.cols();
  const std::size_t half = inverse ? rows - rows / 2 : rows / 2;
  GridC tmp(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t src = (r + half) % rows;
    for (std::size_t c = 0; c < cols; ++c) tmp(r, c) = g(src, c);
  }
  g = std::move(tmp);
}

double doppler_bandwidth(const RadarParams& p) {
  return 2.0 * p.platform_velocity * p.platform_velocity *
         p.synthetic_aperture_time / (p.wavelength * p.center_range);
}

void check_dims(const PhaseHistory& ph) {
  ph.params.validate();
  require(ph.samples.rows() == ph.params.num_range_samples &&
              ph.samples.cols() == ph.params.num_pulses,
          ErrorKind::Data, "phase history dimensions disagree with params");
}

// 8-tap Hamming windowed sinc at fractional offset x from tap center.
double interp_weight(double x) {
  if (x == 0.0) return 1.0;
  const double s = std::sin(M_PI * x) / (M_PI * x);
  return s * (0.54 + 0.46 * std::cos(M_PI * x / 4.0));
}

}  // namespace

ComplexImage focus_rma(const PhaseHistory& ph) {
  check_dims(ph);
  const RadarParams& p = ph.params;
  const std::size_t nr = ph.samples.rows(), np = ph.samples.cols();
  require(nr >= 16 && np >= 16, ErrorKind::Usage,
          "phase history must be at least 16x16");
  require(doppler_bandwidth(p) <= p.prf, ErrorKind::Usage,
          "azimuth bandwidth exceeds PRF (ambiguous acquisition)");

  GridC g = ph.samples;
  range_compress(g, p);
  fft::forward_cols(g);   // fast time -> range frequency (rows)
  fft::forward_rows(g);   // pulse index -> Doppler (cols)
  shift_rows(g, false);   // range frequency monotone increasing down rows

  const double fs = p.range_sample_rate;
  const double fc = kSpeedOfLight / p.wavelength;
  const double k_scale = 4.0 * M_PI / kSpeedOfLight;
  const double k0 = k_scale * (fc - fs * static_cast<double>(nr / 2) /
                                        static_cast<double>(nr));
  const double dk = k_scale * fs / static_cast<double>(nr);
  const double r_ref = p.center_range;

  // Stolt remap per Doppler column: resample along the range wavenumber so
  // K_y = sqrt(K^2 - kx^2) lands on the original uniform K grid.  The
  // spectrum is phase referenced to r_ref first so the interpolator sees a
  // slowly varying signal, then the carrier is restored on the output grid.
  GridC mapped(nr, np);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t n = 0; n < static_cast<std::ptrdiff_t>(np); ++n) {
    const auto nn = static_cast<std::size_t>(n);
    const double f_eta = (nn < (np + 1) / 2)
                             ? static_cast<double>(nn) * p.prf /
                                   static_cast<double>(np)
                             : (static_cast<double>(nn) -
                                static_cast<double>(np)) *
                                   p.prf / static_cast<double>(np);
    const double kx = 2.0 * M_PI * f_eta / p.platform_velocity;
    std::vector<cd> ref(nr);
    for (std::size_t i = 0; i < nr; ++i) {
      const double k = k0 + dk * static_cast<double>(i);
      const double kk = k * k - kx * kx;
      const double ky = kk > 0.0 ? std::sqrt(kk) : 0.0;
      ref[i] = g(i, nn) * std::polar(1.0, r_ref * ky);
    }
    for (std::size_t i = 0; i < nr; ++i) {
      const double ky = k0 + dk * static_cast<double>(i);
      const double k_src = std::sqrt(ky * ky + kx * kx);
      const double j = (k_src - k0) / dk;
      cd acc{0.0, 0.0};
      if (j >= 0.0 && j <= static_cast<double>(nr - 1)) {
        const auto jc = static_cast<std::ptrdiff_t>(std::floor(j));
        for (std::ptrdiff_t t = jc - 3; t <= jc + 4; ++t) {
          if (t < 0 || t >= static_cast<std::ptrdiff_t>(nr)) continue;
          acc += ref[static_cast<std::size_t>(t)] *
                 interp_weight(j - static_cast<double>(t));
        }
      }
      mapped(i, nn) = acc * std::polar(1.0, -r_ref * ky);
    }
  }

  shift_rows(mapped, true);
  fft::inverse_cols(mapped);
  fft::inverse_rows(mapped);

  ComplexImage out;
  out.pixels = std::move(mapped);
  out.azimuth_spacing = p.azimuth_bin();
  out.range_spacing = p.range_bin();
  return out;
}

ComplexImage focus_backprojection(const PhaseHistory& ph,
                                  std::size_t grid_rows,
                                  std::size_t grid_cols) {
  check_dims(ph);
  const RadarParams& p = ph.params;
  const std::size_t nr = ph.samples.rows(), np = ph.samples.cols();
  require(grid_rows > 0 && grid_cols > 0, ErrorKind::Usage,
          "grid dimensions must be positive");
  require(grid_rows <= nr && grid_cols <= np, ErrorKind::Usage,
          "grid outside swath: requested " + std::to_string(grid_rows) + "x" +
              std::to_string(grid_cols) + ", data supports " +
              std::to_string(nr) + "x" + std::to_string(np));

  GridC rc = ph.samples;
  range_compress(rc, p);

  ComplexImage out;
  out.pixels = GridC(grid_rows, grid_cols);
  out.azimuth_spacing = p.azimuth_bin();
  out.range_spacing = p.range_bin();

  const double fs = p.range_sample_rate;
  const double half_aperture = p.aperture_length() / 2.0;
  const double phase_scale = 4.0 * M_PI / p.wavelength;

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t gr = 0; gr < static_cast<std::ptrdiff_t>(grid_rows); ++gr) {
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
      out.pixels(static_cast<std::size_t>(gr), gc) = acc;
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

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t br = 0; br < static_cast<std::ptrdiff_t>(out_rows); ++br) {
    const std::size_t r0 = static_cast<std::size_t>(br) * looks_range;
    const std::size_t r1 = std::min(rows, r0 + looks_range);
    for (std::size_t bc = 0; bc < out_cols; ++bc) {
      const std::size_t c0 = bc * looks_azimuth;
      const std::size_t c1 = std::min(cols, c0 + looks_azimuth);
      double sum = 0.0;
      for (std::size_t r = r0; r < r1; ++r)
        for (std::size_t c = c0; c < c1; ++c) sum += std::norm(img.pixels(r, c));
      out.pixels(static_cast<std::size_t>(br), bc) =
          sum / static_cast<double>((r1 - r0) * (c1 - c0));
    }
  }
  return out;
}

}  // namespace sarcs
