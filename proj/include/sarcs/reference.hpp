#ifndef SARCS_REFERENCE_HPP
#define SARCS_REFERENCE_HPP

#include "sarcs/focusing.hpp"
#include "sarcs/radar.hpp"
#include "sarcs/sampling.hpp"

namespace sarcs::reference {

/// Single-threaded counterparts of the OpenMP kernels.  Same accumulation
/// order, so results are bitwise identical to the parallel versions; kept
/// as test oracles and as the baseline for the benchmark tool.
PhaseHistory simulate_phase_history(const Scene& scene,
                                    const RadarParams& params,
                                    double noise_sigma, std::uint64_t seed);

PhaseHistory apply_mask(const PhaseHistory& ph, const SamplingMask& mask,
                        double noise_floor_sigma, std::uint64_t seed);

ComplexImage focus_backprojection(const PhaseHistory& ph,
                                  std::size_t grid_rows, std::size_t grid_cols);

IntensityImage multilook(const ComplexImage& img, std::size_t looks_azimuth,
                         std::size_t looks_range);

}  // namespace sarcs::reference

#endif
