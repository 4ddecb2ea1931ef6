#include "sarcs/imagery.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "sarcs/errors.hpp"
#include "sarcs/fsio.hpp"

namespace sarcs {
namespace {

constexpr double kLogGuard = 1e-12;
constexpr char kMagic[4] = {'S', 'A', 'R', 'C'};

const char* dtype_tag(RasterDtype d) {
  switch (d) {
    case RasterDtype::cf32: return "cf32";
    case RasterDtype::f32r: return "f32r";
    default: return "u8\0\0";
  }
}

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_f32(std::string& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

float get_f32(const unsigned char* p) {
  return std::bit_cast<float>(get_u32(p));
}

std::string header_bytes(RasterDtype d, std::size_t rows, std::size_t cols) {
  std::string out;
  out.append(kMagic, 4);
  out.append(dtype_tag(d), 4);
  put_u32(out, static_cast<std::uint32_t>(rows));
  put_u32(out, static_cast<std::uint32_t>(cols));
  return out;
}

struct ParsedRaster {
  RasterHeader header;
  const unsigned char* payload;
  std::size_t payload_size;
};

ParsedRaster parse_raster(const std::string& bytes, const std::string& path) {
  require(bytes.size() >= 16, ErrorKind::Data,
          path + ": truncated payload (file shorter than 16-byte header)");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  require(std::memcmp(p, kMagic, 4) == 0, ErrorKind::Data,
          path + ": bad magic (not a SARC raster)");
  RasterHeader h;
  if (std::memcmp(p + 4, "cf32", 4) == 0)
    h.dtype = RasterDtype::cf32;
  else if (std::memcmp(p + 4, "f32r", 4) == 0)
    h.dtype = RasterDtype::f32r;
  else if (std::memcmp(p + 4, "u8\0\0", 4) == 0)
    h.dtype = RasterDtype::u8;
  else
    throw Error(ErrorKind::Data, path + ": unknown dtype tag");
  h.rows = get_u32(p + 8);
  h.cols = get_u32(p + 12);
  require(h.rows > 0 && h.cols > 0, ErrorKind::Data,
          path + ": degenerate dimensions in header");
  const std::size_t count = static_cast<std::size_t>(h.rows) * h.cols;
  std::size_t expect = count;
  if (h.dtype == RasterDtype::cf32) expect = count * 8;
  if (h.dtype == RasterDtype::f32r) expect = count * 4;
  require(bytes.size() - 16 == expect, ErrorKind::Data,
          path + ": truncated payload (" + std::to_string(bytes.size() - 16) +
              " bytes, expected " + std::to_string(expect) + ")");
  return {h, p + 16, expect};
}

void check_dtype(const ParsedRaster& r, RasterDtype want, const std::string& path) {
  require(r.header.dtype == want, ErrorKind::Data,
          path + ": dtype mismatch (expected " + dtype_tag(want) + ")");
}

void check_finite(double v, const std::string& path) {
  require(std::isfinite(v), ErrorKind::Data,
          path + ": refusing to write non-finite value");
}

}  // namespace

RasterHeader peek_raster(const std::string& path) {
  return parse_raster(read_file(path, ErrorKind::Data), path).header;
}

void write_raster(const GridC& g, const std::string& path) {
  std::string out = header_bytes(RasterDtype::cf32, g.rows(), g.cols());
  out.reserve(out.size() + g.size() * 8);
  for (const auto& z : g.storage()) {
    check_finite(z.real(), path);
    check_finite(z.imag(), path);
    put_f32(out, static_cast<float>(z.real()));
    put_f32(out, static_cast<float>(z.imag()));
  }
  write_file_atomic(path, out);
}

void write_raster(const GridD& g, const std::string& path) {
  std::string out = header_bytes(RasterDtype::f32r, g.rows(), g.cols());
  out.reserve(out.size() + g.size() * 4);
  for (double v : g.storage()) {
    check_finite(v, path);
    put_f32(out, static_cast<float>(v));
  }
  write_file_atomic(path, out);
}

void write_raster(const GridU8& g, const std::string& path) {
  std::string out = header_bytes(RasterDtype::u8, g.rows(), g.cols());
  out.append(reinterpret_cast<const char*>(g.data()), g.size());
  write_file_atomic(path, out);
}

GridC read_cf32(const std::string& path) {
  const std::string bytes = read_file(path, ErrorKind::Data);
  ParsedRaster r = parse_raster(bytes, path);
  check_dtype(r, RasterDtype::cf32, path);
  GridC g(r.header.rows, r.header.cols);
  for (std::size_t i = 0; i < g.size(); ++i)
    g.storage()[i] = {get_f32(r.payload + 8 * i), get_f32(r.payload + 8 * i + 4)};
  return g;
}

GridD read_f32r(const std::string& path) {
  const std::string bytes = read_file(path, ErrorKind::Data);
  ParsedRaster r = parse_raster(bytes, path);
  check_dtype(r, RasterDtype::f32r, path);
  GridD g(r.header.rows, r.header.cols);
  for (std::size_t i = 0; i < g.size(); ++i)
    g.storage()[i] = get_f32(r.payload + 4 * i);
  return g;
}

GridU8 read_u8(const std::string& path) {
  const std::string bytes = read_file(path, ErrorKind::Data);
  ParsedRaster r = parse_raster(bytes, path);
  check_dtype(r, RasterDtype::u8, path);
  GridU8 g(r.header.rows, r.header.cols);
  std::memcpy(g.data(), r.payload, r.payload_size);
  return g;
}

NormalizedImage to_normalized(const IntensityImage& img, double floor_db,
                              double ceil_db) {
  require(ceil_db > floor_db, ErrorKind::Usage, "ceil_db must exceed floor_db");
  NormalizedImage out;
  out.floor_db = floor_db;
  out.ceil_db = ceil_db;
  out.pixels = GridD(img.pixels.rows(), img.pixels.cols());
  const double span = ceil_db - floor_db;
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const double p = img.pixels.storage()[i];
    require(p >= 0.0, ErrorKind::Data, "negative intensity sample");
    const double db =
        std::clamp(10.0 * std::log10(p + kLogGuard), floor_db, ceil_db);
    out.pixels.storage()[i] = -1.0 + 2.0 * (db - floor_db) / span;
  }
  return out;
}

IntensityImage from_normalized(const NormalizedImage& img) {
  IntensityImage out;
  out.pixels = GridD(img.pixels.rows(), img.pixels.cols());
  const double span = img.ceil_db - img.floor_db;
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const double db = img.floor_db + (img.pixels.storage()[i] + 1.0) / 2.0 * span;
    out.pixels.storage()[i] = std::max(0.0, std::pow(10.0, db / 10.0) - kLogGuard);
  }
  return out;
}

std::pair<double, double> db_percentiles(const IntensityImage& img,
                                         double lo_frac, double hi_frac) {
  require(0.0 <= lo_frac && lo_frac < hi_frac && hi_frac <= 1.0,
          ErrorKind::Usage, "percentile fractions must satisfy 0 <= lo < hi <= 1");
  require(!img.pixels.empty(), ErrorKind::Usage, "empty image");
  std::vector<double> sorted(img.pixels.storage());
  std::sort(sorted.begin(), sorted.end());
  auto pick = [&](double f) {
    const auto idx = static_cast<std::size_t>(
        std::llround(f * static_cast<double>(sorted.size() - 1)));
    return 10.0 * std::log10(sorted[idx] + kLogGuard);
  };
  return {pick(lo_frac), pick(hi_frac)};
}

double psnr(const NormalizedImage& a, const NormalizedImage& b) {
  require(a.pixels.same_shape(b.pixels), ErrorKind::Usage,
          "psnr requires equal dimensions");
  require(!a.pixels.empty(), ErrorKind::Usage, "psnr of empty images");
  double mse = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = a.pixels.storage()[i] - b.pixels.storage()[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.pixels.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(4.0 / mse);
}

double ssim(const NormalizedImage& a, const NormalizedImage& b) {
  require(a.pixels.same_shape(b.pixels), ErrorKind::Usage,
          "ssim requires equal dimensions");
  const std::size_t rows = a.pixels.rows(), cols = a.pixels.cols();
  require(rows >= 8 && cols >= 8, ErrorKind::Usage,
          "ssim requires at least 8x8 images");
  constexpr double c1 = 0.01 * 2.0 * 0.01 * 2.0;
  constexpr double c2 = 0.03 * 2.0 * 0.03 * 2.0;
  constexpr std::size_t w = 8;
  constexpr double n = 64.0;
  double total = 0.0;
  std::size_t windows = 0;
  for (std::size_t r0 = 0; r0 + w <= rows; ++r0) {
    for (std::size_t c0 = 0; c0 + w <= cols; ++c0) {
      double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
      for (std::size_t r = r0; r < r0 + w; ++r)
        for (std::size_t c = c0; c < c0 + w; ++c) {
          const double va = a.pixels(r, c), vb = b.pixels(r, c);
          sa += va;
          sb += vb;
          saa += va * va;
          sbb += vb * vb;
          sab += va * vb;
        }
      const double ma = sa / n, mb = sb / n;
      const double va = saa / n - ma * ma;
      const double vb = sbb / n - mb * mb;
      const double cov = sab / n - ma * mb;
      total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

double ghost_ratio(const IntensityImage& img, std::size_t azimuth_offset) {
  const std::size_t rows = img.pixels.rows(), cols = img.pixels.cols();
  require(azimuth_offset < cols, ErrorKind::Usage,
          "azimuth offset must be smaller than the azimuth dimension");
  std::size_t pr = 0, pc = 0;
  double peak = -1.0;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (img.pixels(r, c) > peak) {
        peak = img.pixels(r, c);
        pr = r;
        pc = c;
      }
  require(peak > 0.0, ErrorKind::Data, "all-zero image has no peak");
  const std::size_t gc = (pc + azimuth_offset) % cols;
  double ghost = 0.0;
  for (std::ptrdiff_t dr = -1; dr <= 1; ++dr)
    for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
      const std::size_t r =
          static_cast<std::size_t>((static_cast<std::ptrdiff_t>(pr + rows) + dr) %
                                   static_cast<std::ptrdiff_t>(rows));
      const std::size_t c =
          static_cast<std::size_t>((static_cast<std::ptrdiff_t>(gc + cols) + dc) %
                                   static_cast<std::ptrdiff_t>(cols));
      ghost = std::max(ghost, img.pixels(r, c));
    }
  return std::sqrt(ghost / peak);
}

namespace {

void write_pgm16(const GridD& values, double lo, double hi,
                 const std::string& path) {
  std::string out = "P5\n" + std::to_string(values.cols()) + " " +
                    std::to_string(values.rows()) + "\n65535\n";
  const double span = hi > lo ? hi - lo : 1.0;
  out.reserve(out.size() + values.size() * 2);
  for (double v : values.storage()) {
    const double t = std::clamp((v - lo) / span, 0.0, 1.0);
    const auto q = static_cast<std::uint16_t>(std::lround(t * 65535.0));
    out.push_back(static_cast<char>(q >> 8));
    out.push_back(static_cast<char>(q & 0xff));
  }
  write_file_atomic(path, out);
}

}  // namespace

void export_pgm(const NormalizedImage& img, const std::string& path) {
  write_pgm16(img.pixels, -1.0, 1.0, path);
}

void export_pgm(const IntensityImage& img, const std::string& path) {
  require(!img.pixels.empty(), ErrorKind::Usage, "cannot export empty image");
  const auto [lo, hi] = std::minmax_element(img.pixels.storage().begin(),
                                            img.pixels.storage().end());
  write_pgm16(img.pixels, *lo, *hi, path);
}

}  // namespace sarcs
