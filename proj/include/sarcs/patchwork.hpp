#ifndef SARCS_PATCHWORK_HPP
#define SARCS_PATCHWORK_HPP

#include <cstddef>
#include <vector>

#include "sarcs/diffusion.hpp"
#include "sarcs/grid.hpp"
#include "sarcs/imagery.hpp"

namespace sarcs {

/// Deterministic overlapping-tile decomposition.  Offsets advance by stride
/// and the final offset is clamped so the last tile ends exactly at the
/// image border.  Tiles are enumerated row-major over (row, col) offsets.
struct TilePlan {
  std::size_t image_rows = 0;
  std::size_t image_cols = 0;
  std::size_t tile = 0;
  std::size_t stride = 0;
  std::vector<std::size_t> row_offsets;
  std::vector<std::size_t> col_offsets;

  std::size_t tile_count() const { return row_offsets.size() * col_offsets.size(); }
};

TilePlan plan_tiles(std::size_t rows, std::size_t cols, std::size_t tile,
                    std::size_t stride);

/// Separable raised-cosine window, each axis floored at 0.05 so border
/// pixels still contribute to the blend.
GridD hann_blend_weights(std::size_t tile);

GridD extract_tile(const GridD& img, std::size_t r0, std::size_t c0,
                   std::size_t tile);

/// Weighted average of tile contributions in plan order:
/// out = sum(w * tile) / sum(w) over covering tiles.
GridD stitch(const std::vector<GridD>& tiles, const TilePlan& plan,
             const GridD& weights);

/// Monotone quantile mapping of tile's empirical distribution onto
/// reference's (mid-rank ties, linear interpolation between order
/// statistics).  A constant reference yields a constant result and sets
/// *constant_reference when provided.
GridD histogram_normalize(const GridD& tile, const GridD& reference,
                          bool* constant_reference = nullptr);

/// Conditional tiled reconstruction: per-tile diffusion sampling seeded
/// with base seed + tile index, optional per-tile histogram normalization
/// against the condition tile, then blended stitching.  Output pixels are
/// clamped to [-1, 1] and inherit the condition's dB mapping.
NormalizedImage reconstruct_tiled(const NormalizedImage& condition,
                                  const Denoiser& denoiser,
                                  const SamplerConfig& config,
                                  const TilePlan& plan, const GridD& weights,
                                  bool histnorm);

}  // namespace sarcs

#endif
