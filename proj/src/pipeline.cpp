#include "sarcs/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>

#include "json.hpp"
#include "sarcs/diffusion.hpp"
#include "sarcs/errors.hpp"
#include "sarcs/focusing.hpp"
#include "sarcs/fsio.hpp"
#include "sarcs/patchwork.hpp"
#include "sarcs/rng.hpp"

namespace sarcs {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json parse_json(const std::string& path, ErrorKind kind) {
  try {
    return json::parse(read_file(path, kind));
  } catch (const json::parse_error& e) {
    throw Error(kind, path + ": " + e.what());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    require(ok, ErrorKind::Usage, where + ": unknown key \"" + key + "\"");
  }
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  const json j = parse_json(path, ErrorKind::Usage);
  check_keys(j,
             {"radar_path", "output_dir", "mask", "noise", "multilook",
              "normalization", "schedule", "tiling", "training",
              "sampling_seed", "pairs", "scene"},
             path);
  ExperimentConfig cfg;

  require(j.contains("radar_path"), ErrorKind::Usage,
          path + ": missing \"radar_path\"");
  fs::path radar_path = j.at("radar_path").get<std::string>();
  if (radar_path.is_relative())
    radar_path = fs::path(path).parent_path() / radar_path;
  cfg.radar = load_radar_params(radar_path.string());

  cfg.output_dir = j.value("output_dir", cfg.output_dir);

  if (j.contains("mask")) {
    const json& m = j.at("mask");
    check_keys(m, {"pattern", "azimuth_ratio", "range_ratio", "seed"},
               path + ":mask");
    cfg.mask.pattern =
        mask_pattern_from_name(m.value("pattern", "regular_azimuth"));
    cfg.mask.azimuth_ratio = m.value("azimuth_ratio", cfg.mask.azimuth_ratio);
    cfg.mask.range_ratio = m.value("range_ratio", cfg.mask.range_ratio);
    cfg.mask.seed = m.value("seed", cfg.mask.seed);
  }
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    check_keys(n, {"thermal_sigma", "thermal_seed", "floor_sigma", "floor_seed"},
               path + ":noise");
    cfg.thermal_sigma = n.value("thermal_sigma", cfg.thermal_sigma);
    cfg.thermal_seed = n.value("thermal_seed", cfg.thermal_seed);
    cfg.floor_sigma = n.value("floor_sigma", cfg.floor_sigma);
    cfg.floor_seed = n.value("floor_seed", cfg.floor_seed);
  }
  if (j.contains("multilook")) {
    const json& m = j.at("multilook");
    check_keys(m, {"azimuth", "range"}, path + ":multilook");
    cfg.looks_azimuth = m.value("azimuth", cfg.looks_azimuth);
    cfg.looks_range = m.value("range", cfg.looks_range);
  }
  if (j.contains("normalization")) {
    const json& n = j.at("normalization");
    check_keys(n, {"lo", "hi"}, path + ":normalization");
    cfg.norm_lo = n.value("lo", cfg.norm_lo);
    cfg.norm_hi = n.value("hi", cfg.norm_hi);
  }
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    check_keys(s, {"steps", "beta_start", "beta_end"}, path + ":schedule");
    cfg.steps = s.value("steps", cfg.steps);
    cfg.beta_start = s.value("beta_start", cfg.beta_start);
    cfg.beta_end = s.value("beta_end", cfg.beta_end);
  }
  if (j.contains("tiling")) {
    const json& t = j.at("tiling");
    check_keys(t, {"tile", "stride", "histnorm"}, path + ":tiling");
    cfg.tile = t.value("tile", cfg.tile);
    cfg.stride = t.value("stride", cfg.stride);
    cfg.histnorm = t.value("histnorm", cfg.histnorm);
  }
  if (j.contains("training")) {
    const json& t = j.at("training");
    check_keys(t,
               {"patch_size", "buckets", "ridge_lambda", "samples_per_pair",
                "seed"},
               path + ":training");
    cfg.training.patch_size = t.value("patch_size", cfg.training.patch_size);
    cfg.training.bucket_count = t.value("buckets", cfg.training.bucket_count);
    cfg.training.ridge_lambda = t.value("ridge_lambda", cfg.training.ridge_lambda);
    cfg.training.samples_per_pair =
        t.value("samples_per_pair", cfg.training.samples_per_pair);
    cfg.training.seed = t.value("seed", cfg.training.seed);
  }
  cfg.sampling_seed = j.value("sampling_seed", cfg.sampling_seed);
  if (j.contains("pairs")) {
    const json& p = j.at("pairs");
    check_keys(p, {"count", "base_seed"}, path + ":pairs");
    cfg.pair_count = p.value("count", cfg.pair_count);
    cfg.scene_base_seed = p.value("base_seed", cfg.scene_base_seed);
  }
  if (j.contains("scene")) {
    const json& s = j.at("scene");
    check_keys(s, {"speckle", "points"}, path + ":scene");
    if (s.contains("speckle")) {
      const json& sp = s.at("speckle");
      check_keys(sp, {"azimuth_extent", "range_extent", "cell_spacing", "amplitude"},
                 path + ":scene:speckle");
      cfg.scene.speckle_azimuth_extent =
          sp.value("azimuth_extent", cfg.scene.speckle_azimuth_extent);
      cfg.scene.speckle_range_extent =
          sp.value("range_extent", cfg.scene.speckle_range_extent);
      cfg.scene.speckle_cell_spacing =
          sp.value("cell_spacing", cfg.scene.speckle_cell_spacing);
      cfg.scene.speckle_amplitude =
          sp.value("amplitude", cfg.scene.speckle_amplitude);
    }
    if (s.contains("points")) {
      const json& pt = s.at("points");
      check_keys(pt,
                 {"count", "amplitude_min", "amplitude_max", "azimuth_extent",
                  "range_extent"},
                 path + ":scene:points");
      cfg.scene.point_count = pt.value("count", cfg.scene.point_count);
      cfg.scene.point_amplitude_min =
          pt.value("amplitude_min", cfg.scene.point_amplitude_min);
      cfg.scene.point_amplitude_max =
          pt.value("amplitude_max", cfg.scene.point_amplitude_max);
      cfg.scene.point_azimuth_extent =
          pt.value("azimuth_extent", cfg.scene.point_azimuth_extent);
      cfg.scene.point_range_extent =
          pt.value("range_extent", cfg.scene.point_range_extent);
    }
  }
  return cfg;
}

Scene generate_scene(const SceneRecipe& recipe, std::uint64_t seed,
                     double center_range) {
  Scene scene;
  if (recipe.speckle_amplitude > 0.0 &&
      recipe.speckle_azimuth_extent >= recipe.speckle_cell_spacing &&
      recipe.speckle_range_extent >= recipe.speckle_cell_spacing) {
    Scene sp = simulate_speckle_scene(
        recipe.speckle_azimuth_extent, recipe.speckle_range_extent,
        recipe.speckle_cell_spacing, derive_seed(seed, 1));
    for (auto& v : sp.reflectivity_grid->values.storage())
      v *= recipe.speckle_amplitude;
    scene.reflectivity_grid = std::move(sp.reflectivity_grid);
  }
  if (recipe.point_count > 0) {
    Rng rng(derive_seed(seed, 2));
    for (std::size_t k = 0; k < recipe.point_count; ++k) {
      Scatterer s;
      s.azimuth_pos = (rng.uniform() - 0.5) * recipe.point_azimuth_extent;
      s.range_pos = center_range + (rng.uniform() - 0.5) * recipe.point_range_extent;
      s.amplitude = recipe.point_amplitude_min +
                    rng.uniform() * (recipe.point_amplitude_max -
                                     recipe.point_amplitude_min);
      s.phase = rng.uniform() * 2.0 * M_PI;
      scene.scatterers.push_back(s);
    }
  }
  return scene;
}

void write_normalized(const NormalizedImage& img, const std::string& path) {
  ensure_parent(path);
  write_raster(img.pixels, path);
  json j{{"floor_db", img.floor_db}, {"ceil_db", img.ceil_db}};
  write_file_atomic(path + ".json", j.dump(2) + "\n");
}

NormalizedImage read_normalized(const std::string& path) {
  NormalizedImage img;
  img.pixels = read_f32r(path);
  const json j = parse_json(path + ".json", ErrorKind::Data);
  require(j.contains("floor_db") && j.contains("ceil_db"), ErrorKind::Data,
          path + ".json: missing dB mapping fields");
  img.floor_db = j.at("floor_db").get<double>();
  img.ceil_db = j.at("ceil_db").get<double>();
  require(img.ceil_db > img.floor_db, ErrorKind::Data,
          path + ".json: ceil_db must exceed floor_db");
  for (double& v : img.pixels.storage()) v = std::clamp(v, -1.0, 1.0);
  return img;
}

namespace {

json mask_to_json(const MaskConfig& m) {
  return json{{"pattern", mask_pattern_name(m.pattern)},
              {"azimuth_ratio", m.azimuth_ratio},
              {"range_ratio", m.range_ratio},
              {"seed", m.seed}};
}

MaskConfig mask_from_json(const json& j, const std::string& where) {
  MaskConfig m;
  try {
    m.pattern = mask_pattern_from_name(j.value("pattern", "regular_azimuth"));
  } catch (const Error& e) {
    throw Error(ErrorKind::Data, where + ": " + e.what());
  }
  m.azimuth_ratio = j.value("azimuth_ratio", 1.0);
  m.range_ratio = j.value("range_ratio", 1.0);
  m.seed = j.value("seed", std::uint64_t{0});
  return m;
}

}  // namespace

void save_manifest(const PairManifest& m, const std::string& path) {
  json entries = json::array();
  for (const auto& e : m.pairs)
    entries.push_back({{"clean", e.clean_path},
                       {"condition", e.condition_path},
                       {"floor_db", e.floor_db},
                       {"ceil_db", e.ceil_db},
                       {"mask", mask_to_json(e.mask)},
                       {"scene_seed", e.scene_seed},
                       {"rows", e.rows},
                       {"cols", e.cols}});
  json j{{"pairs", std::move(entries)}, {"errors", m.errors}};
  ensure_parent(path);
  write_file_atomic(path, j.dump(2) + "\n");
}

PairManifest load_manifest(const std::string& path) {
  const json j = parse_json(path, ErrorKind::Data);
  const fs::path base = fs::path(path).parent_path();
  PairManifest m;
  require(j.contains("pairs") && j.at("pairs").is_array(), ErrorKind::Data,
          path + ": missing pairs array");
  for (const auto& e : j.at("pairs")) {
    PairEntry entry;
    entry.clean_path = (base / e.at("clean").get<std::string>()).string();
    entry.condition_path = (base / e.at("condition").get<std::string>()).string();
    entry.floor_db = e.value("floor_db", 0.0);
    entry.ceil_db = e.value("ceil_db", 0.0);
    if (e.contains("mask")) entry.mask = mask_from_json(e.at("mask"), path);
    entry.scene_seed = e.value("scene_seed", std::uint64_t{0});
    entry.rows = e.value("rows", std::size_t{0});
    entry.cols = e.value("cols", std::size_t{0});
    m.pairs.push_back(std::move(entry));
  }
  if (j.contains("errors"))
    for (const auto& e : j.at("errors")) m.errors.push_back(e.get<std::string>());
  return m;
}

PairManifest cmd_pairgen(const ExperimentConfig& cfg) {
  require(cfg.pair_count >= 1, ErrorKind::Usage, "pair count must be positive");
  fs::create_directories(cfg.output_dir);
  PairManifest manifest;

  for (std::size_t i = 0; i < cfg.pair_count; ++i) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "pair_%04zu", i);
    try {
      const std::uint64_t scene_seed = derive_seed(cfg.scene_base_seed, i);
      const Scene scene =
          generate_scene(cfg.scene, scene_seed, cfg.radar.center_range);
      const PhaseHistory ph =
          simulate_phase_history(scene, cfg.radar, cfg.thermal_sigma,
                                 derive_seed(cfg.thermal_seed, i));

      MaskConfig mc = cfg.mask;
      mc.seed = derive_seed(cfg.mask.seed, i);
      const SamplingMask mask =
          build_mask(mc.pattern, mc.azimuth_ratio, mc.range_ratio,
                     ph.samples.rows(), ph.samples.cols(), mc.seed);
      const PhaseHistory masked =
          apply_mask(ph, mask, cfg.floor_sigma, derive_seed(cfg.floor_seed, i));

      const IntensityImage clean_i =
          multilook(focus_rma(ph), cfg.looks_azimuth, cfg.looks_range);
      const IntensityImage cond_i =
          multilook(focus_rma(masked), cfg.looks_azimuth, cfg.looks_range);

      auto [floor_db, ceil_db] = db_percentiles(clean_i, cfg.norm_lo, cfg.norm_hi);
      if (ceil_db < floor_db + 1.0) ceil_db = floor_db + 1.0;
      const NormalizedImage clean_n = to_normalized(clean_i, floor_db, ceil_db);
      const NormalizedImage cond_n = to_normalized(cond_i, floor_db, ceil_db);

      PairEntry entry;
      entry.clean_path = std::string(stem) + "_clean.sarc";
      entry.condition_path = std::string(stem) + "_cond.sarc";
      entry.floor_db = floor_db;
      entry.ceil_db = ceil_db;
      entry.mask = mc;
      entry.scene_seed = scene_seed;
      entry.rows = clean_n.pixels.rows();
      entry.cols = clean_n.pixels.cols();
      write_normalized(clean_n, (fs::path(cfg.output_dir) / entry.clean_path).string());
      write_normalized(cond_n,
                       (fs::path(cfg.output_dir) / entry.condition_path).string());
      manifest.pairs.push_back(std::move(entry));
    } catch (const Error& e) {
      manifest.errors.push_back(std::string(stem) + ": " + e.what());
    }
  }

  require(!manifest.pairs.empty(), ErrorKind::Data,
          "all pairs failed" +
              (manifest.errors.empty() ? std::string{}
                                       : "; first: " + manifest.errors.front()));
  save_manifest(manifest, (fs::path(cfg.output_dir) / "manifest.json").string());
  return manifest;
}

void cmd_train(const ExperimentConfig& cfg, const std::string& manifest_path,
               const std::string& model_path, TrainReport* report) {
  const PairManifest manifest = load_manifest(manifest_path);
  require(!manifest.pairs.empty(), ErrorKind::Data,
          manifest_path + ": manifest holds no pairs");

  std::vector<TrainingPair> pairs;
  for (const auto& e : manifest.pairs) {
    try {
      TrainingPair p;
      p.clean = read_normalized(e.clean_path);
      p.condition = read_normalized(e.condition_path);
      require(p.clean.pixels.rows() == e.rows && p.clean.pixels.cols() == e.cols,
              ErrorKind::Data,
              e.clean_path + ": raster disagrees with manifest dimensions");
      require(p.condition.pixels.rows() == e.rows &&
                  p.condition.pixels.cols() == e.cols,
              ErrorKind::Data,
              e.condition_path + ": raster disagrees with manifest dimensions");
      pairs.push_back(std::move(p));
    } catch (const Error& err) {
      std::cerr << "warning: skipping pair (" << err.what() << ")\n";
    }
  }
  require(!pairs.empty(), ErrorKind::Data, "no usable pairs in manifest");

  const NoiseSchedule schedule =
      linear_schedule(cfg.steps, cfg.beta_start, cfg.beta_end);
  TrainReport local;
  const PatchRegressor model =
      train_regressor(pairs, schedule, cfg.training, &local);
  ensure_parent(model_path);
  save_model(model, model_path);

  std::cout << "trained on " << pairs.size() << " pairs; held-out eps MSE "
            << local.heldout_mse << " over " << local.heldout_count
            << " samples\n";
  for (std::size_t b : local.empty_buckets)
    std::cout << "note: bucket " << b << " was empty, using identity fallback\n";
  if (report) *report = local;
}

void cmd_reconstruct(const ExperimentConfig& cfg,
                     const std::string& condition_path,
                     const std::string& model_path,
                     const std::string& output_path) {
  const NormalizedImage condition = read_normalized(condition_path);
  const PatchRegressor model = load_model(model_path);
  require(model.total_steps == cfg.steps, ErrorKind::Usage,
          "model trained for T=" + std::to_string(model.total_steps) +
              " but schedule has T=" + std::to_string(cfg.steps));

  const TilePlan plan = plan_tiles(condition.pixels.rows(),
                                   condition.pixels.cols(), cfg.tile, cfg.stride);
  const GridD weights = hann_blend_weights(cfg.tile);
  const PatchDenoiser denoiser(model);
  SamplerConfig sc;
  sc.schedule = linear_schedule(cfg.steps, cfg.beta_start, cfg.beta_end);
  sc.seed = cfg.sampling_seed;

  const NormalizedImage out =
      reconstruct_tiled(condition, denoiser, sc, plan, weights, cfg.histnorm);
  ensure_parent(output_path);
  write_normalized(out, output_path);
}

EvalReport cmd_eval(const std::string& recon_path, const std::string& clean_path,
                    const std::string& condition_path,
                    std::optional<std::size_t> ghost_offset) {
  const NormalizedImage recon = read_normalized(recon_path);
  const NormalizedImage clean = read_normalized(clean_path);
  const NormalizedImage condition = read_normalized(condition_path);
  require(recon.pixels.same_shape(clean.pixels) &&
              clean.pixels.same_shape(condition.pixels),
          ErrorKind::Usage, "eval inputs must share dimensions");

  EvalReport r;
  r.ghost_offset = ghost_offset.value_or(clean.pixels.cols() / 2);
  r.psnr_recon = psnr(recon, clean);
  r.psnr_condition = psnr(condition, clean);
  r.ssim_recon = ssim(recon, clean);
  r.ssim_condition = ssim(condition, clean);
  r.ghost_recon = ghost_ratio(from_normalized(recon), r.ghost_offset);
  r.ghost_condition = ghost_ratio(from_normalized(condition), r.ghost_offset);
  return r;
}

std::string eval_report_json(const EvalReport& r) {
  auto val = [](double v) -> json {
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    return v;
  };
  json j{{"psnr_recon", val(r.psnr_recon)},
         {"psnr_condition", val(r.psnr_condition)},
         {"ssim_recon", val(r.ssim_recon)},
         {"ssim_condition", val(r.ssim_condition)},
         {"ghost_recon", val(r.ghost_recon)},
         {"ghost_condition", val(r.ghost_condition)},
         {"ghost_offset", r.ghost_offset}};
  return j.dump(2) + "\n";
}

}  // namespace sarcs
