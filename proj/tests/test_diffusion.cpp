#include <cmath>

#include "doctest.h"
#include "sarcs/diffusion.hpp"
#include "sarcs/errors.hpp"
#include "sarcs/rng.hpp"

using namespace sarcs;

namespace {

GridD scalar(double v) { return GridD(1, 1, v); }

}  // namespace

TEST_SUITE("diffusion") {
  TEST_CASE("linear schedule endpoints and monotonicity") {
    const NoiseSchedule s = linear_schedule(1000, 1e-4, 0.02);
    CHECK(s.total_steps() == 1000);
    CHECK(s.beta(1) == doctest::Approx(1e-4));
    CHECK(s.beta(1000) == doctest::Approx(0.02));
    CHECK(s.beta(500) < s.beta(501));
    for (std::size_t t = 1; t <= 1000; ++t) {
      CHECK(s.alpha(t) == doctest::Approx(1.0 - s.beta(t)));
      if (t > 1) CHECK(s.alpha_bar(t) < s.alpha_bar(t - 1));
    }
    CHECK(s.alpha_bar(1000) < 1e-4);
    CHECK_THROWS_AS(linear_schedule(10, 0.5, 0.2), Error);
    CHECK_THROWS_AS(linear_schedule(0, 1e-4, 0.02), Error);
  }

  TEST_CASE("two-step chain with constant beta, frozen values") {
    // beta = 1/2 everywhere gives abar = {1/2, 1/4}
    const NoiseSchedule s = linear_schedule(2, 0.5, 0.5);
    CHECK(s.alpha_bar(1) == doctest::Approx(0.5));
    CHECK(s.alpha_bar(2) == doctest::Approx(0.25));

    const Latent x0{scalar(1.0), 0};
    const GridD eps = scalar(1.0);
    const Latent x2 = q_sample(x0, 2, eps, s);
    CHECK(x2.timestep == 2);
    CHECK(x2.pixels(0, 0) == doctest::Approx(0.5 + std::sqrt(0.75)));

    // reverse with the true eps: mean lands on 1.115355...
    const Latent x1 = p_step(x2, 2, eps, s, nullptr);
    CHECK(x1.timestep == 1);
    const double expect_x1 =
        (x2.pixels(0, 0) - 0.5 / std::sqrt(0.75)) / std::sqrt(0.5);
    CHECK(x1.pixels(0, 0) == doctest::Approx(expect_x1));
    CHECK(expect_x1 == doctest::Approx(1.1153550716504106));

    // the eps consistent with (x1, x0=1) closes the chain exactly
    const double eps1 = (x1.pixels(0, 0) - std::sqrt(0.5)) / std::sqrt(0.5);
    CHECK(eps1 == doctest::Approx(0.57735026918962573));
    const Latent xhat0 = p_step(x1, 1, scalar(eps1), s, nullptr);
    CHECK(xhat0.timestep == 0);
    CHECK(xhat0.pixels(0, 0) == doctest::Approx(1.0));
  }

  TEST_CASE("q_sample inverts analytically") {
    const NoiseSchedule s = linear_schedule(1000, 1e-4, 0.02);
    Rng rng(31);
    for (int i = 0; i < 200; ++i) {
      const double x0 = 2.0 * rng.uniform() - 1.0;
      const double e = rng.gaussian();
      const auto t = static_cast<std::size_t>(rng.below(1000)) + 1;
      const Latent xt = q_sample(Latent{scalar(x0), 0}, t, scalar(e), s);
      const double abar = s.alpha_bar(t);
      const double rec =
          (xt.pixels(0, 0) - std::sqrt(1.0 - abar) * e) / std::sqrt(abar);
      CHECK(rec == doctest::Approx(x0).epsilon(1e-9));
    }
  }

  TEST_CASE("p_step injects noise only above t = 1") {
    const NoiseSchedule s = linear_schedule(4, 0.1, 0.4);
    const Latent x{scalar(0.3), 3};
    const GridD eps = scalar(0.2);
    const GridD n = scalar(1.0);

    const Latent with = p_step(x, 3, eps, s, &n);
    const Latent without = p_step(x, 3, eps, s, nullptr);
    CHECK(with.pixels(0, 0) - without.pixels(0, 0) ==
          doctest::Approx(std::sqrt(s.beta(3))));

    const Latent t1_with = p_step(Latent{scalar(0.3), 1}, 1, eps, s, &n);
    const Latent t1_without = p_step(Latent{scalar(0.3), 1}, 1, eps, s, nullptr);
    CHECK(t1_with.pixels(0, 0) == t1_without.pixels(0, 0));
  }

  TEST_CASE("timestep bounds are enforced") {
    const NoiseSchedule s = linear_schedule(10, 1e-4, 0.02);
    const Latent x{scalar(0.0), 0};
    CHECK_THROWS_AS(q_sample(x, 0, scalar(0.0), s), Error);
    CHECK_THROWS_AS(q_sample(x, 11, scalar(0.0), s), Error);
    CHECK_THROWS_AS(p_step(x, 0, scalar(0.0), s), Error);
  }

  TEST_CASE("analytic gaussian denoiser reduces to shrinkage for unit prior") {
    const NoiseSchedule s = linear_schedule(100, 1e-3, 0.05);
    const AnalyticGaussianDenoiser d(0.0, 1.0, s);
    // for x0 ~ N(0,1) the posterior eps is sqrt(1-abar) x_t
    for (std::size_t t : {std::size_t{1}, std::size_t{37}, std::size_t{100}}) {
      const GridD out = d.predict(scalar(0.8), t, nullptr);
      CHECK(out(0, 0) ==
            doctest::Approx(std::sqrt(1.0 - s.alpha_bar(t)) * 0.8));
    }
  }

  TEST_CASE("sampler trajectories hit the analytic prior") {
    SamplerConfig cfg;
    cfg.schedule = linear_schedule(1000, 1e-4, 0.02);
    const AnalyticGaussianDenoiser d(0.7, 0.1, cfg.schedule);
    double sum = 0.0, sq = 0.0;
    const int n = 400;
    for (int i = 0; i < n; ++i) {
      cfg.seed = 1000 + static_cast<std::uint64_t>(i);
      const Latent x = sample(d, nullptr, cfg, 1, 1);
      CHECK(x.timestep == 0);
      sum += x.pixels(0, 0);
      sq += x.pixels(0, 0) * x.pixels(0, 0);
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(mean == doctest::Approx(0.7).epsilon(0.05));
    // sampler variance tracks the prior variance loosely at this sample count
    CHECK(var == doctest::Approx(0.01).epsilon(0.5));
  }

  TEST_CASE("sampling is deterministic per seed") {
    SamplerConfig cfg;
    cfg.schedule = linear_schedule(50, 1e-3, 0.05);
    cfg.seed = 9;
    const AnalyticGaussianDenoiser d(0.0, 1.0, cfg.schedule);
    const Latent a = sample(d, nullptr, cfg, 3, 4);
    const Latent b = sample(d, nullptr, cfg, 3, 4);
    CHECK(a.pixels == b.pixels);
    cfg.seed = 10;
    const Latent c = sample(d, nullptr, cfg, 3, 4);
    CHECK_FALSE(a.pixels == c.pixels);
  }
}
