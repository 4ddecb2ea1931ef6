#ifndef SARCS_IMAGERY_HPP
#define SARCS_IMAGERY_HPP

#include <cstdint>
#include <string>
#include <utility>

#include "sarcs/focusing.hpp"
#include "sarcs/grid.hpp"

namespace sarcs {

/// Log-intensity image mapped affinely into [-1, 1], the domain the
/// diffusion machinery operates in.
struct NormalizedImage {
  GridD pixels;
  double floor_db = -60.0;
  double ceil_db = 0.0;
};

enum class RasterDtype : std::uint8_t { cf32, f32r, u8 };

struct RasterHeader {
  RasterDtype dtype;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
};

/// v = 10*log10(pixel + 1e-12), clamped to [floor_db, ceil_db], then mapped
/// affinely onto [-1, 1].
NormalizedImage to_normalized(const IntensityImage& img, double floor_db,
                              double ceil_db);

/// Inverse of to_normalized up to the clamping (looks metadata reset to 1).
IntensityImage from_normalized(const NormalizedImage& img);

/// dB values of the lo/hi intensity quantiles, for picking a dynamic range.
std::pair<double, double> db_percentiles(const IntensityImage& img,
                                         double lo_frac, double hi_frac);

/// 10*log10(peak^2/MSE) with peak = 2; +inf when the images are identical.
double psnr(const NormalizedImage& a, const NormalizedImage& b);

/// Mean local SSIM over sliding 8x8 uniform windows, dynamic range 2.
double ssim(const NormalizedImage& a, const NormalizedImage& b);

/// Amplitude ratio between the strongest response in a 3x3 neighbourhood
/// an azimuth_offset of columns away (wrapped) from the global intensity
/// peak, and the peak itself.
double ghost_ratio(const IntensityImage& img, std::size_t azimuth_offset);

RasterHeader peek_raster(const std::string& path);
void write_raster(const GridC& g, const std::string& path);
void write_raster(const GridD& g, const std::string& path);
void write_raster(const GridU8& g, const std::string& path);
GridC read_cf32(const std::string& path);
GridD read_f32r(const std::string& path);
GridU8 read_u8(const std::string& path);

/// 16-bit binary PGM, most significant byte first.
void export_pgm(const NormalizedImage& img, const std::string& path);
void export_pgm(const IntensityImage& img, const std::string& path);

}  // namespace sarcs

#endif
