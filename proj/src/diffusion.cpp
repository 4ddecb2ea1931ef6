#include "sarcs/diffusion.hpp"

#include <cmath>
#include <string>

#include "sarcs/errors.hpp"
#include "sarcs/rng.hpp"

namespace sarcs {

NoiseSchedule linear_schedule(std::size_t total_steps, double beta_start,
                              double beta_end) {
  require(total_steps >= 1, ErrorKind::Usage, "schedule needs at least one step");
  require(0.0 < beta_start && beta_start <= beta_end && beta_end < 1.0,
          ErrorKind::Usage, "betas must satisfy 0 < start <= end < 1");
  NoiseSchedule s;
  s.betas.resize(total_steps);
  s.alphas.resize(total_steps);
  s.alpha_bars.resize(total_steps);
  double bar = 1.0;
  for (std::size_t i = 0; i < total_steps; ++i) {
    const double frac =
        total_steps == 1 ? 0.0
                         : static_cast<double>(i) /
                               static_cast<double>(total_steps - 1);
    s.betas[i] = beta_start + (beta_end - beta_start) * frac;
    s.alphas[i] = 1.0 - s.betas[i];
    bar *= s.alphas[i];
    s.alpha_bars[i] = bar;
  }
  return s;
}

namespace {

void check_t(std::size_t t, const NoiseSchedule& s) {
  require(t >= 1 && t <= s.total_steps(), ErrorKind::Usage,
          "timestep " + std::to_string(t) + " outside [1, " +
              std::to_string(s.total_steps()) + "]");
}

}  // namespace

Latent q_sample(const Latent& x0, std::size_t t, const GridD& eps,
                const NoiseSchedule& s) {
  check_t(t, s);
  require(x0.pixels.same_shape(eps), ErrorKind::Usage,
          "q_sample shape mismatch between x0 and eps");
  const double a = std::sqrt(s.alpha_bar(t));
  const double b = std::sqrt(1.0 - s.alpha_bar(t));
  Latent out;
  out.timestep = t;
  out.pixels = GridD(x0.pixels.rows(), x0.pixels.cols());
  for (std::size_t i = 0; i < out.pixels.size(); ++i)
    out.pixels.storage()[i] =
        a * x0.pixels.storage()[i] + b * eps.storage()[i];
  return out;
}

Latent p_step(const Latent& x_t, std::size_t t, const GridD& eps_hat,
              const NoiseSchedule& s, const GridD* noise) {
  check_t(t, s);
  require(x_t.pixels.same_shape(eps_hat), ErrorKind::Usage,
          "p_step shape mismatch between x_t and eps_hat");
  if (noise)
    require(x_t.pixels.same_shape(*noise), ErrorKind::Usage,
            "p_step shape mismatch between x_t and noise");
  const double inv_sqrt_alpha = 1.0 / std::sqrt(s.alpha(t));
  const double eps_coef = s.beta(t) / std::sqrt(1.0 - s.alpha_bar(t));
  const double sigma = t > 1 ? std::sqrt(s.beta(t)) : 0.0;
  Latent out;
  out.timestep = t - 1;
  out.pixels = GridD(x_t.pixels.rows(), x_t.pixels.cols());
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    double v = inv_sqrt_alpha *
               (x_t.pixels.storage()[i] - eps_coef * eps_hat.storage()[i]);
    if (noise && sigma > 0.0) v += sigma * noise->storage()[i];
    out.pixels.storage()[i] = v;
  }
  return out;
}

Latent sample(const Denoiser& denoiser, const GridD* condition,
              const SamplerConfig& config, std::size_t rows, std::size_t cols) {
  const NoiseSchedule& s = config.schedule;
  require(s.total_steps() >= 1, ErrorKind::Usage, "empty schedule");
  Rng rng(config.seed);

  Latent x;
  x.timestep = s.total_steps();
  x.pixels = GridD(rows, cols);
  for (auto& v : x.pixels.storage()) v = rng.gaussian();

  GridD noise(rows, cols);
  for (std::size_t t = s.total_steps(); t >= 1; --t) {
    GridD eps_hat = denoiser.predict(x.pixels, t, condition);
    require(eps_hat.same_shape(x.pixels), ErrorKind::Numeric,
            "denoiser output shape mismatch at step " + std::to_string(t));
    if (t > 1) {
      for (auto& v : noise.storage()) v = rng.gaussian();
      x = p_step(x, t, eps_hat, s, &noise);
    } else {
      x = p_step(x, t, eps_hat, s, nullptr);
    }
  }
  return x;
}

AnalyticGaussianDenoiser::AnalyticGaussianDenoiser(double mu0, double sigma0,
                                                   const NoiseSchedule& s)
    : mu0_(mu0), var0_(sigma0 * sigma0), schedule_(s) {
  require(sigma0 > 0.0, ErrorKind::Usage, "sigma0 must be positive");
}

GridD AnalyticGaussianDenoiser::predict(const GridD& noisy, std::size_t t,
                                        const GridD* /*condition*/) const {
  check_t(t, schedule_);
  const double abar = schedule_.alpha_bar(t);
  const double sqrt_abar = std::sqrt(abar);
  const double gain = sqrt_abar * var0_ / (abar * var0_ + 1.0 - abar);
  const double denom = std::sqrt(1.0 - abar);
  GridD out(noisy.rows(), noisy.cols());
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    const double xt = noisy.storage()[i];
    const double post_mean = mu0_ + gain * (xt - sqrt_abar * mu0_);
    out.storage()[i] = (xt - sqrt_abar * post_mean) / denom;
  }
  return out;
}

}  // namespace sarcs
