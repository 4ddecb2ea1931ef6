#ifndef SARCS_RNG_HPP
#define SARCS_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace sarcs {

/// splitmix64 mixing step, used to derive independent substream seeds
/// (per column, per tile, per pair) from a base seed and an index.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return mix_seed(mix_seed(base) ^ (0xA0761D6478BD642FULL * (index + 1)));
}

/// Deterministic random source. All distributions are generated with
/// explicit algorithms (53-bit uniforms, Box-Muller, rejection sampling)
/// rather than std:: distribution adaptors, so a given seed produces the
/// same stream on every standard library. Reproducibility of artifacts
/// depends on this.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    /// Standard normal via Box-Muller; pairs cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] keeps the log finite.
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Circular complex Gaussian with E[|z|^2] = sigma^2.
    std::complex<double> circular_gaussian(double sigma) {
        const double s = sigma * M_SQRT1_2;
        const double re = gaussian();
        const double im = gaussian();
        return {s * re, s * im};
    }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sarcs

#endif
