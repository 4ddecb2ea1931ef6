#include "sarcs/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace sarcs::fft {
namespace {

// Plan creation is not thread safe in FFTW; execution via the new-array
// interface is.  Plans are cached per (length, sign) and created with
// FFTW_UNALIGNED so they can run on any caller buffer.
class PlanCache {
 public:
  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> scratch(n);
    fftw_plan p = fftw_plan_dft_1d(
        static_cast<int>(n), reinterpret_cast<fftw_complex*>(scratch.data()),
        reinterpret_cast<fftw_complex*>(scratch.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [key, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void execute(std::complex<double>* data, std::size_t n, int sign) {
  if (n == 0) return;
  fftw_plan p = cache().get(n, sign);
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, d, d);
}

}  // namespace

void forward(std::complex<double>* data, std::size_t n) {
  execute(data, n, FFTW_FORWARD);
}

void inverse(std::complex<double>* data, std::size_t n) {
  execute(data, n, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) data[i] *= scale;
}

void forward_rows(GridC& g) {
  const std::size_t rows = g.rows(), cols = g.cols();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(rows); ++r)
    forward(g.data() + static_cast<std::size_t>(r) * cols, cols);
}

void inverse_rows(GridC& g) {
  const std::size_t rows = g.rows(), cols = g.cols();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(rows); ++r)
    inverse(g.data() + static_cast<std::size_t>(r) * cols, cols);
}

namespace {

template <typename Fn>
void transform_cols(GridC& g, Fn&& fn) {
  const std::size_t rows = g.rows(), cols = g.cols();
#pragma omp parallel
  {
    std::vector<std::complex<double>> buf(rows);
#pragma omp for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(cols); ++c) {
      for (std::size_t r = 0; r < rows; ++r)
        buf[r] = g(r, static_cast<std::size_t>(c));
      fn(buf.data(), rows);
      for (std::size_t r = 0; r < rows; ++r)
        g(r, static_cast<std::size_t>(c)) = buf[r];
    }
  }
}

}  // namespace

void forward_cols(GridC& g) {
  transform_cols(g, [](std::complex<double>* d, std::size_t n) { forward(d, n); });
}

void inverse_cols(GridC& g) {
  transform_cols(g, [](std::complex<double>* d, std::size_t n) { inverse(d, n); });
}

}  // namespace sarcs::fft
