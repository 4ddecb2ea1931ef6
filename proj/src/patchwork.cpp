#include "sarcs/patchwork.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sarcs/errors.hpp"

namespace sarcs {

TilePlan plan_tiles(std::size_t rows, std::size_t cols, std::size_t tile,
                    std::size_t stride) {
  require(tile >= 1, ErrorKind::Usage, "tile size must be positive");
  require(tile <= rows && tile <= cols, ErrorKind::Usage,
          "tile " + std::to_string(tile) + " exceeds image " +
              std::to_string(rows) + "x" + std::to_string(cols));
  require(stride >= 1 && stride <= tile, ErrorKind::Usage,
          "stride must lie in [1, tile]");

  auto axis = [&](std::size_t dim) {
    std::vector<std::size_t> offsets;
    for (std::size_t o = 0; o + tile <= dim; o += stride) offsets.push_back(o);
    const std::size_t last = dim - tile;
    if (offsets.empty() || offsets.back() != last) offsets.push_back(last);
    return offsets;
  };

  TilePlan plan;
  plan.image_rows = rows;
  plan.image_cols = cols;
  plan.tile = tile;
  plan.stride = stride;
  plan.row_offsets = axis(rows);
  plan.col_offsets = axis(cols);
  return plan;
}

GridD hann_blend_weights(std::size_t tile) {
  require(tile >= 1, ErrorKind::Usage, "tile size must be positive");
  std::vector<double> w(tile);
  for (std::size_t i = 0; i < tile; ++i) {
    const double s =
        std::sin(M_PI * (static_cast<double>(i) + 0.5) / static_cast<double>(tile));
    w[i] = std::max(0.05, s * s);
  }
  GridD out(tile, tile);
  for (std::size_t r = 0; r < tile; ++r)
    for (std::size_t c = 0; c < tile; ++c) out(r, c) = w[r] * w[c];
  return out;
}

GridD extract_tile(const GridD& img, std::size_t r0, std::size_t c0,
                   std::size_t tile) {
  require(r0 + tile <= img.rows() && c0 + tile <= img.cols(), ErrorKind::Usage,
          "tile extraction out of bounds");
  GridD out(tile, tile);
  for (std::size_t r = 0; r < tile; ++r)
    for (std::size_t c = 0; c < tile; ++c) out(r, c) = img(r0 + r, c0 + c);
  return out;
}

GridD stitch(const std::vector<GridD>& tiles, const TilePlan& plan,
             const GridD& weights) {
  require(tiles.size() == plan.tile_count(), ErrorKind::Usage,
          "tile count " + std::to_string(tiles.size()) + " does not match plan (" +
              std::to_string(plan.tile_count()) + ")");
  require(weights.rows() == plan.tile && weights.cols() == plan.tile,
          ErrorKind::Usage, "blend weights must be tile x tile");
  for (const double w : weights.storage())
    require(w > 0.0, ErrorKind::Usage, "blend weights must be positive");

  GridD num(plan.image_rows, plan.image_cols);
  GridD den(plan.image_rows, plan.image_cols);
  std::size_t k = 0;
  for (const std::size_t r0 : plan.row_offsets) {
    for (const std::size_t c0 : plan.col_offsets) {
      const GridD& t = tiles[k];
      require(t.rows() == plan.tile && t.cols() == plan.tile, ErrorKind::Usage,
              "tile " + std::to_string(k) + " has wrong shape");
      for (std::size_t r = 0; r < plan.tile; ++r)
        for (std::size_t c = 0; c < plan.tile; ++c) {
          const double w = weights(r, c);
          num(r0 + r, c0 + c) += w * t(r, c);
          den(r0 + r, c0 + c) += w;
        }
      ++k;
    }
  }
  for (std::size_t i = 0; i < num.size(); ++i)
    num.storage()[i] /= den.storage()[i];
  return num;
}

GridD histogram_normalize(const GridD& tile, const GridD& reference,
                          bool* constant_reference) {
  require(!tile.empty() && !reference.empty(), ErrorKind::Usage,
          "histogram_normalize needs non-empty inputs");

  std::vector<double> ref_sorted(reference.storage());
  std::sort(ref_sorted.begin(), ref_sorted.end());
  const bool ref_constant = ref_sorted.front() == ref_sorted.back();
  if (constant_reference) *constant_reference = ref_constant;
  if (ref_constant) {
    GridD out(tile.rows(), tile.cols());
    std::fill(out.storage().begin(), out.storage().end(), ref_sorted.front());
    return out;
  }

  const std::size_t n = tile.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = tile.storage()[a], vb = tile.storage()[b];
    return va < vb || (va == vb && a < b);
  });

  const double m1 = static_cast<double>(ref_sorted.size() - 1);
  const double n1 = n > 1 ? static_cast<double>(n - 1) : 1.0;
  GridD out(tile.rows(), tile.cols());
  // Equal tile values share one mid-rank so ties map to identical outputs.
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    const double v = tile.storage()[order[i]];
    while (j < n && tile.storage()[order[j]] == v) ++j;
    const double midrank = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0;
    const double pos = midrank / n1 * m1;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, ref_sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    const double mapped = ref_sorted[lo] * (1.0 - frac) + ref_sorted[hi] * frac;
    for (std::size_t p = i; p < j; ++p) out.storage()[order[p]] = mapped;
    i = j;
  }
  return out;
}

NormalizedImage reconstruct_tiled(const NormalizedImage& condition,
                                  const Denoiser& denoiser,
                                  const SamplerConfig& config,
                                  const TilePlan& plan, const GridD& weights,
                                  bool histnorm) {
  require(plan.image_rows == condition.pixels.rows() &&
              plan.image_cols == condition.pixels.cols(),
          ErrorKind::Usage, "tile plan does not match condition dimensions");

  const std::size_t count = plan.tile_count();
  const std::size_t cols_n = plan.col_offsets.size();
  std::vector<GridD> tiles(count);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(count); ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const std::size_t r0 = plan.row_offsets[kk / cols_n];
    const std::size_t c0 = plan.col_offsets[kk % cols_n];
    const GridD cond_tile = extract_tile(condition.pixels, r0, c0, plan.tile);
    SamplerConfig tile_cfg = config;
    tile_cfg.seed = config.seed + kk;
    GridD result =
        sample(denoiser, &cond_tile, tile_cfg, plan.tile, plan.tile).pixels;
    if (histnorm) result = histogram_normalize(result, cond_tile);
    tiles[kk] = std::move(result);
  }

  NormalizedImage out;
  out.floor_db = condition.floor_db;
  out.ceil_db = condition.ceil_db;
  out.pixels = stitch(tiles, plan, weights);
  for (double& v : out.pixels.storage()) v = std::clamp(v, -1.0, 1.0);
  return out;
}

}  // namespace sarcs
