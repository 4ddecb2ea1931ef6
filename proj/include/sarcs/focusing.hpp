#ifndef SARCS_FOCUSING_HPP
#define SARCS_FOCUSING_HPP

#include <cstddef>

#include "sarcs/grid.hpp"
#include "sarcs/radar.hpp"

namespace sarcs {

/// Focused single-look complex image.  Row r sits at absolute slant range
/// r * range_spacing, column m at azimuth (m - cols/2) * azimuth_spacing,
/// matching the phase history's natural sample grid.
struct ComplexImage {
  GridC pixels;
  double azimuth_spacing = 1.0;  // m/px
  double range_spacing = 1.0;    // m/px
};

struct IntensityImage {
  GridD pixels;
  std::size_t looks_azimuth = 1;
  std::size_t looks_range = 1;
  double azimuth_spacing = 1.0;
  double range_spacing = 1.0;
};

/// Omega-k (range migration) focusing: range FFT, chirp matched filter,
/// azimuth FFT, Stolt remap onto the uniform range wavenumber grid, 2-D
/// inverse FFT.  Output dimensions equal input dimensions.
ComplexImage focus_rma(const PhaseHistory& ph);

/// Time-domain backprojection reference.  Exact per-pixel coherent sum over
/// pulses; O(pixels x pulses), intended as an oracle for focus_rma.
ComplexImage focus_backprojection(const PhaseHistory& ph,
                                  std::size_t grid_rows,
                                  std::size_t grid_cols);

/// Incoherent block average of |pixel|^2 over looks_range x looks_azimuth
/// blocks; trailing partial blocks are averaged over their actual size.
IntensityImage multilook(const ComplexImage& img, std::size_t looks_azimuth,
                         std::size_t looks_range);

}  // namespace sarcs

#endif
