#ifndef SARCS_SAMPLING_HPP
#define SARCS_SAMPLING_HPP

#include <cstdint>
#include <string>

#include "sarcs/grid.hpp"
#include "sarcs/radar.hpp"

namespace sarcs {

enum class MaskPattern {
  RegularAzimuth,
  RegularAzimuthRandomRange,
  RandomAzimuth,
  ApertureGap,
};

const char* mask_pattern_name(MaskPattern p);
MaskPattern mask_pattern_from_name(const std::string& name);

/// Boolean retention mask over a phase history, rows = range samples,
/// cols = azimuth pulses.  keep entries are 0 or 1.
struct SamplingMask {
  GridU8 keep;
  MaskPattern pattern = MaskPattern::RegularAzimuth;
  double azimuth_ratio = 1.0;
  double range_ratio = 1.0;
  std::uint64_t seed = 0;
};

/// Pattern construction:
///  - RegularAzimuth keeps every round(1/azimuth_ratio)-th column from 0.
///  - RegularAzimuthRandomRange additionally keeps only a random
///    round(range_ratio*rows)-subset of rows per retained column.
///  - RandomAzimuth keeps a random round(azimuth_ratio*cols)-subset of columns.
///  - ApertureGap keeps one contiguous run of round(azimuth_ratio*cols)
///    columns at a random offset.
/// Random subsets come from seeded Fisher-Yates prefixes (exact cardinality).
SamplingMask build_mask(MaskPattern pattern, double azimuth_ratio,
                        double range_ratio, std::size_t rows, std::size_t cols,
                        std::uint64_t seed);

/// Retained entries copy through; dropped entries are REPLACED by circular
/// complex Gaussian noise of std noise_floor_sigma (exact zeros when 0).
PhaseHistory apply_mask(const PhaseHistory& ph, const SamplingMask& mask,
                        double noise_floor_sigma, std::uint64_t seed);

double retained_fraction(const SamplingMask& mask);

/// u8 raster plus JSON sidecar {pattern, azimuth_ratio, range_ratio, seed}.
void save_mask(const SamplingMask& mask, const std::string& raster_path,
               const std::string& sidecar_path);
SamplingMask load_mask(const std::string& raster_path,
                       const std::string& sidecar_path);

}  // namespace sarcs

#endif
