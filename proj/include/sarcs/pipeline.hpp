#ifndef SARCS_PIPELINE_HPP
#define SARCS_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sarcs/cond_denoiser.hpp"
#include "sarcs/imagery.hpp"
#include "sarcs/radar.hpp"
#include "sarcs/sampling.hpp"

namespace sarcs {

struct MaskConfig {
  MaskPattern pattern = MaskPattern::RegularAzimuth;
  double azimuth_ratio = 0.5;
  double range_ratio = 1.0;
  std::uint64_t seed = 0;
};

/// Recipe for deterministic synthetic scenes: a speckle background plus a
/// handful of bright point scatterers placed uniformly inside the given
/// window (meters, azimuth x range around the scene center).
struct SceneRecipe {
  double speckle_azimuth_extent = 0.0;
  double speckle_range_extent = 0.0;
  double speckle_cell_spacing = 1.0;
  double speckle_amplitude = 1.0;
  std::size_t point_count = 0;
  double point_amplitude_min = 1.0;
  double point_amplitude_max = 1.0;
  double point_azimuth_extent = 0.0;
  double point_range_extent = 0.0;
};

struct ExperimentConfig {
  RadarParams radar;
  std::string output_dir = "out";
  MaskConfig mask;
  double thermal_sigma = 0.0;
  std::uint64_t thermal_seed = 0;
  double floor_sigma = 0.0;
  std::uint64_t floor_seed = 0;
  std::size_t looks_azimuth = 20;
  std::size_t looks_range = 4;
  double norm_lo = 0.01;   // intensity quantile giving floor_db
  double norm_hi = 0.999;  // intensity quantile giving ceil_db
  std::size_t steps = 1000;
  double beta_start = 1e-4;
  double beta_end = 0.02;
  std::size_t tile = 256;
  std::size_t stride = 64;
  bool histnorm = false;
  TrainConfig training;
  std::uint64_t sampling_seed = 0;
  std::size_t pair_count = 8;
  std::uint64_t scene_base_seed = 1;
  SceneRecipe scene;
};

/// Parses the experiment JSON; radar_path is resolved relative to the
/// config file's directory.  Unknown keys are rejected to catch typos.
ExperimentConfig load_experiment_config(const std::string& path);

struct PairEntry {
  std::string clean_path;
  std::string condition_path;
  double floor_db = 0.0;
  double ceil_db = 0.0;
  MaskConfig mask;  // seed is the per-pair derived value actually used
  std::uint64_t scene_seed = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

struct PairManifest {
  std::vector<PairEntry> pairs;
  std::vector<std::string> errors;
};

void save_manifest(const PairManifest& m, const std::string& path);
PairManifest load_manifest(const std::string& path);

/// Normalized raster plus a JSON sidecar (path + ".json") carrying the dB
/// mapping, so metrics can be computed in intensity units later.
void write_normalized(const NormalizedImage& img, const std::string& path);
NormalizedImage read_normalized(const std::string& path);

Scene generate_scene(const SceneRecipe& recipe, std::uint64_t seed,
                     double center_range);

/// simulate -> focus both full and masked histories -> multilook -> shared
/// normalization -> rasters plus manifest.  Failed pairs are recorded in the
/// manifest error list; throws only if every pair fails.
PairManifest cmd_pairgen(const ExperimentConfig& cfg);

/// Trains the patch regressor over the manifest pairs and writes the model.
/// Unreadable pairs are skipped with a warning on stderr.
void cmd_train(const ExperimentConfig& cfg, const std::string& manifest_path,
               const std::string& model_path, TrainReport* report = nullptr);

void cmd_reconstruct(const ExperimentConfig& cfg,
                     const std::string& condition_path,
                     const std::string& model_path,
                     const std::string& output_path);

struct EvalReport {
  double psnr_recon = 0.0;
  double psnr_condition = 0.0;
  double ssim_recon = 0.0;
  double ssim_condition = 0.0;
  double ghost_recon = 0.0;
  double ghost_condition = 0.0;
  std::size_t ghost_offset = 0;
};

EvalReport cmd_eval(const std::string& recon_path, const std::string& clean_path,
                    const std::string& condition_path,
                    std::optional<std::size_t> ghost_offset = std::nullopt);

std::string eval_report_json(const EvalReport& r);

}  // namespace sarcs

#endif
