#ifndef SARCS_DIFFUSION_HPP
#define SARCS_DIFFUSION_HPP

#include <cstdint>
#include <vector>

#include "sarcs/grid.hpp"

namespace sarcs {

/// DDPM beta/alpha sequences.  Accessors are 1-based in the timestep t,
/// matching the usual notation (t runs from 1 to T).
struct NoiseSchedule {
  std::vector<double> betas;
  std::vector<double> alphas;
  std::vector<double> alpha_bars;

  std::size_t total_steps() const { return betas.size(); }
  double beta(std::size_t t) const { return betas[t - 1]; }
  double alpha(std::size_t t) const { return alphas[t - 1]; }
  double alpha_bar(std::size_t t) const { return alpha_bars[t - 1]; }
};

NoiseSchedule linear_schedule(std::size_t total_steps, double beta_start,
                              double beta_end);

/// A (possibly noisy) image in the normalized domain, tagged with its
/// diffusion timestep; t = 0 is the clean end of the chain.
struct Latent {
  GridD pixels;
  std::size_t timestep = 0;
};

/// Forward corruption x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps.
Latent q_sample(const Latent& x0, std::size_t t, const GridD& eps,
                const NoiseSchedule& s);

/// One reverse step with the epsilon parameterization and fixed variance
/// sigma_t^2 = beta_t (zero at t = 1).  noise == nullptr means no injected
/// noise.
Latent p_step(const Latent& x_t, std::size_t t, const GridD& eps_hat,
              const NoiseSchedule& s, const GridD* noise = nullptr);

/// Epsilon predictor contract.  condition, when present, is the pixel field
/// of the conditioning image in the same normalized domain and shape.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual GridD predict(const GridD& noisy, std::size_t t,
                        const GridD* condition) const = 0;
};

struct SamplerConfig {
  NoiseSchedule schedule;
  std::uint64_t seed = 0;
};

/// Full reverse trajectory: draws x_T from a standard Gaussian and iterates
/// p_step down to t = 1, handing condition to the denoiser at every step.
/// Deterministic per seed.
Latent sample(const Denoiser& denoiser, const GridD* condition,
              const SamplerConfig& config, std::size_t rows, std::size_t cols);

/// Exact posterior-mean epsilon predictor for x0 ~ N(mu0, sigma0^2 I);
/// verifies the sampler end to end.  Ignores the condition.
class AnalyticGaussianDenoiser final : public Denoiser {
 public:
  AnalyticGaussianDenoiser(double mu0, double sigma0, const NoiseSchedule& s);
  GridD predict(const GridD& noisy, std::size_t t,
                const GridD* condition) const override;

 private:
  double mu0_;
  double var0_;
  const NoiseSchedule& schedule_;
};

}  // namespace sarcs

#endif
