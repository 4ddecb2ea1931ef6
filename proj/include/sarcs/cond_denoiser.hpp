#ifndef SARCS_COND_DENOISER_HPP
#define SARCS_COND_DENOISER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sarcs/diffusion.hpp"
#include "sarcs/grid.hpp"
#include "sarcs/imagery.hpp"
#include "sarcs/rng.hpp"

namespace sarcs {

/// Matched training images: clean from the full phase history, condition
/// from the subsampled one, sharing a single dB mapping.
struct TrainingPair {
  NormalizedImage clean;
  NormalizedImage condition;
};

/// Per-timestep-bucket affine epsilon predictors on square patches.
/// Features are the concatenated x_t and condition patches (length 2d,
/// d = patch_size^2); eps_hat = W [x; c] + b per bucket.
struct PatchRegressor {
  std::size_t patch_size = 8;
  std::size_t bucket_count = 10;
  std::size_t total_steps = 1000;
  double ridge_lambda = 1e-3;
  std::vector<std::vector<double>> weights;  // B entries, each d x 2d row-major
  std::vector<std::vector<double>> biases;   // B entries, each d

  std::size_t dim() const { return patch_size * patch_size; }
  /// Total map: every t in [1, total_steps] selects exactly one bucket.
  std::size_t bucket_of(std::size_t t) const;
};

struct PatchPair {
  GridD clean;
  GridD condition;
  std::size_t row0 = 0;
  std::size_t col0 = 0;
};

/// One uniformly random patch offset, identical for both images of the pair.
PatchPair extract_training_patch(const TrainingPair& pair,
                                 std::size_t patch_size, Rng& rng);

struct TrainConfig {
  std::size_t patch_size = 8;
  std::size_t bucket_count = 10;
  double ridge_lambda = 1e-3;
  std::size_t samples_per_pair = 2000;
  std::uint64_t seed = 0;
};

struct TrainReport {
  std::vector<std::size_t> bucket_samples;
  std::vector<std::size_t> empty_buckets;  // fell back to identity on x_t
  double heldout_mse = 0.0;
  std::size_t heldout_count = 0;
};

/// Closed-form ridge fit per bucket on (x_t, condition) -> eps samples drawn
/// from the pairs via q_sample.  Every 8th drawn sample is held out for the
/// reported MSE.  Deterministic per seed.
PatchRegressor train_regressor(const std::vector<TrainingPair>& pairs,
                               const NoiseSchedule& schedule,
                               const TrainConfig& config,
                               TrainReport* report = nullptr);

GridD predict_eps(const PatchRegressor& model, const GridD& x_t_patch,
                  std::size_t t, const GridD& condition_patch);

/// DenoiserInterface adapter: applies the patch regressor blockwise over the
/// input (clamped final block when dimensions are not a multiple of the
/// patch size, overlaps averaged).
class PatchDenoiser final : public Denoiser {
 public:
  explicit PatchDenoiser(PatchRegressor model) : model_(std::move(model)) {}
  GridD predict(const GridD& noisy, std::size_t t,
                const GridD* condition) const override;
  const PatchRegressor& model() const { return model_; }

 private:
  PatchRegressor model_;
};

/// "SARM" model container: header {patch_size, B, T, ridge_lambda} then the
/// per-bucket weights and biases as little-endian float64.
void save_model(const PatchRegressor& model, const std::string& path);
PatchRegressor load_model(const std::string& path);

}  // namespace sarcs

#endif
