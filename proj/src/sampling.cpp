#include "sarcs/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "json.hpp"
#include "sarcs/errors.hpp"
#include "sarcs/fsio.hpp"
#include "sarcs/imagery.hpp"
#include "sarcs/rng.hpp"

namespace sarcs {

const char* mask_pattern_name(MaskPattern p) {
  switch (p) {
    case MaskPattern::RegularAzimuth: return "regular_azimuth";
    case MaskPattern::RegularAzimuthRandomRange:
      return "regular_azimuth_random_range";
    case MaskPattern::RandomAzimuth: return "random_azimuth";
    default: return "aperture_gap";
  }
}

MaskPattern mask_pattern_from_name(const std::string& name) {
  if (name == "regular_azimuth") return MaskPattern::RegularAzimuth;
  if (name == "regular_azimuth_random_range")
    return MaskPattern::RegularAzimuthRandomRange;
  if (name == "random_azimuth") return MaskPattern::RandomAzimuth;
  if (name == "aperture_gap") return MaskPattern::ApertureGap;
  throw Error(ErrorKind::Usage, "unknown mask pattern \"" + name + "\"");
}

namespace {

// First k elements of a seeded Fisher-Yates shuffle of 0..n-1.
std::vector<std::size_t> random_prefix(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i)
    std::swap(idx[i], idx[i + static_cast<std::size_t>(
                                  rng.below(static_cast<std::uint64_t>(n - i)))]);
  idx.resize(k);
  return idx;
}

std::size_t checked_count(double ratio, std::size_t n, const char* what) {
  const auto k = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(n)));
  require(k >= 1, ErrorKind::Usage,
          std::string("ratio implies zero retained ") + what);
  return std::min(k, n);
}

}  // namespace

SamplingMask build_mask(MaskPattern pattern, double azimuth_ratio,
                        double range_ratio, std::size_t rows, std::size_t cols,
                        std::uint64_t seed) {
  require(azimuth_ratio > 0.0 && azimuth_ratio <= 1.0, ErrorKind::Usage,
          "azimuth ratio must lie in (0, 1]");
  require(range_ratio > 0.0 && range_ratio <= 1.0, ErrorKind::Usage,
          "range ratio must lie in (0, 1]");
  require(rows >= 2 && cols >= 2, ErrorKind::Usage,
          "mask needs at least 2x2 dimensions");

  SamplingMask m;
  m.keep = GridU8(rows, cols);
  m.pattern = pattern;
  m.azimuth_ratio = azimuth_ratio;
  m.range_ratio = range_ratio;
  m.seed = seed;

  auto keep_column = [&](std::size_t c) {
    for (std::size_t r = 0; r < rows; ++r) m.keep(r, c) = 1;
  };

  switch (pattern) {
    case MaskPattern::RegularAzimuth: {
      const auto period = static_cast<std::size_t>(
          std::max<long long>(1, std::llround(1.0 / azimuth_ratio)));
      for (std::size_t c = 0; c < cols; c += period) keep_column(c);
      break;
    }
    case MaskPattern::RegularAzimuthRandomRange: {
      const auto period = static_cast<std::size_t>(
          std::max<long long>(1, std::llround(1.0 / azimuth_ratio)));
      const std::size_t k = checked_count(range_ratio, rows, "rows");
      for (std::size_t c = 0; c < cols; c += period) {
        Rng col_rng(derive_seed(seed, c));
        for (std::size_t r : random_prefix(rows, k, col_rng)) m.keep(r, c) = 1;
      }
      break;
    }
    case MaskPattern::RandomAzimuth: {
      const std::size_t k = checked_count(azimuth_ratio, cols, "columns");
      Rng rng(seed);
      for (std::size_t c : random_prefix(cols, k, rng)) keep_column(c);
      break;
    }
    case MaskPattern::ApertureGap: {
      const std::size_t len = checked_count(azimuth_ratio, cols, "columns");
      Rng rng(seed);
      const auto offset = static_cast<std::size_t>(
          rng.below(static_cast<std::uint64_t>(cols - len + 1)));
      for (std::size_t c = offset; c < offset + len; ++c) keep_column(c);
      break;
    }
  }
  return m;
}

PhaseHistory apply_mask(const PhaseHistory& ph, const SamplingMask& mask,
                        double noise_floor_sigma, std::uint64_t seed) {
  require(noise_floor_sigma >= 0.0, ErrorKind::Usage,
          "noise floor sigma must be nonnegative");
  require(ph.samples.rows() == mask.keep.rows() &&
              ph.samples.cols() == mask.keep.cols(),
          ErrorKind::Data,
          "mask dimensions " + std::to_string(mask.keep.rows()) + "x" +
              std::to_string(mask.keep.cols()) + " do not match phase history " +
              std::to_string(ph.samples.rows()) + "x" +
              std::to_string(ph.samples.cols()));

  PhaseHistory out;
  out.params = ph.params;
  out.samples = GridC(ph.samples.rows(), ph.samples.cols());
  const std::size_t rows = ph.samples.rows();
  const auto cols = static_cast<std::ptrdiff_t>(ph.samples.cols());

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < cols; ++c) {
    const auto cc = static_cast<std::size_t>(c);
    Rng rng(derive_seed(seed, cc));
    for (std::size_t r = 0; r < rows; ++r) {
      if (mask.keep(r, cc)) {
        out.samples(r, cc) = ph.samples(r, cc);
      } else if (noise_floor_sigma > 0.0) {
        out.samples(r, cc) = rng.circular_gaussian(noise_floor_sigma);
      }
    }
  }
  return out;
}

double retained_fraction(const SamplingMask& mask) {
  require(!mask.keep.empty(), ErrorKind::Usage, "empty mask");
  std::size_t kept = 0;
  for (auto v : mask.keep.storage()) kept += v ? 1 : 0;
  return static_cast<double>(kept) / static_cast<double>(mask.keep.size());
}

void save_mask(const SamplingMask& mask, const std::string& raster_path,
               const std::string& sidecar_path) {
  write_raster(mask.keep, raster_path);
  nlohmann::json j{{"pattern", mask_pattern_name(mask.pattern)},
                   {"azimuth_ratio", mask.azimuth_ratio},
                   {"range_ratio", mask.range_ratio},
                   {"seed", mask.seed}};
  write_file_atomic(sidecar_path, j.dump(2) + "\n");
}

SamplingMask load_mask(const std::string& raster_path,
                       const std::string& sidecar_path) {
  SamplingMask m;
  m.keep = read_u8(raster_path);
  for (auto v : m.keep.storage())
    require(v <= 1, ErrorKind::Data,
            raster_path + ": mask entries must be 0 or 1");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(sidecar_path, ErrorKind::Data));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Data, sidecar_path + ": " + e.what());
  }
  try {
    m.pattern = mask_pattern_from_name(j.value("pattern", std::string{}));
  } catch (const Error& e) {
    throw Error(ErrorKind::Data, sidecar_path + ": " + e.what());
  }
  m.azimuth_ratio = j.value("azimuth_ratio", 1.0);
  m.range_ratio = j.value("range_ratio", 1.0);
  m.seed = j.value("seed", std::uint64_t{0});
  return m;
}

}  // namespace sarcs
