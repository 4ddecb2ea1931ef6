#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "doctest.h"
#include "sarcs/errors.hpp"
#include "sarcs/fsio.hpp"
#include "sarcs/imagery.hpp"
#include "sarcs/pipeline.hpp"
#include "sarcs/rng.hpp"

using namespace sarcs;

namespace {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const char* name) {
    path = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
};

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Usage;
}

// Critically sampled single-point geometry: the full dwell matches the
// acquisition and the Doppler bandwidth matches the PRF, so dropping every
// other pulse folds energy to an azimuth offset of exactly half the image.
ExperimentConfig ghost_config(const std::string& out_dir) {
  ExperimentConfig cfg;
  cfg.radar.wavelength = 0.03;
  cfg.radar.chirp_rate = 5.0e13;
  cfg.radar.pulse_duration = 1.0e-6;
  cfg.radar.range_sample_rate = 6.0e7;
  cfg.radar.prf = 240.0;
  cfg.radar.platform_velocity = 30.0;
  cfg.radar.num_pulses = 64;
  cfg.radar.num_range_samples = 128;
  cfg.radar.synthetic_aperture_time = 64.0 / 240.0;
  cfg.radar.center_range =
      2.0 * 30.0 * 30.0 * cfg.radar.synthetic_aperture_time /
      (0.03 * 240.0 * 0.9999);
  cfg.output_dir = out_dir;
  cfg.mask.pattern = MaskPattern::RegularAzimuth;
  cfg.mask.azimuth_ratio = 0.5;
  cfg.mask.seed = 11;
  cfg.thermal_sigma = 0.0;
  cfg.floor_sigma = 0.0;
  cfg.looks_azimuth = 1;
  cfg.looks_range = 1;
  cfg.norm_lo = 0.01;
  cfg.norm_hi = 1.0;
  cfg.pair_count = 1;
  cfg.scene_base_seed = 21;
  cfg.scene.speckle_amplitude = 0.0;
  cfg.scene.point_count = 1;
  cfg.scene.point_amplitude_min = 1.0;
  cfg.scene.point_amplitude_max = 1.0;
  cfg.scene.point_azimuth_extent = 0.0;
  cfg.scene.point_range_extent = 0.0;
  return cfg;
}

NormalizedImage smooth_image(std::size_t n, std::size_t k) {
  constexpr double kPi = 3.14159265358979323846;
  NormalizedImage img;
  img.pixels = GridD(n, n);
  img.floor_db = -50.0;
  img.ceil_db = 0.0;
  const double f1 = 1.0 + static_cast<double>(k % 3);
  const double f2 = 1.0 + static_cast<double>((k / 3) % 3);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      img.pixels(r, c) =
          0.85 *
          std::sin(2.0 * kPi * f1 * (static_cast<double>(r) + 0.5) / n +
                   0.3 * static_cast<double>(k)) *
          std::cos(2.0 * kPi * f2 * (static_cast<double>(c) + 0.5) / n +
                   0.7 * static_cast<double>(k));
  return img;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("experiment config lands every field and resolves radar_path") {
    TempDir tmp("sarcs_pipeline_cfg");
    RadarParams radar;
    radar.platform_velocity = 31.0;
    radar.center_range = 271.5;
    save_radar_params(radar, tmp.file("radar.json"));

    const std::string cfg_json = R"({
      "radar_path": "radar.json",
      "output_dir": "out/exp",
      "mask": {"pattern": "aperture_gap", "azimuth_ratio": 0.7,
               "range_ratio": 0.9, "seed": 12},
      "noise": {"thermal_sigma": 1.5, "thermal_seed": 3,
                "floor_sigma": 2.5, "floor_seed": 4},
      "multilook": {"azimuth": 5, "range": 3},
      "normalization": {"lo": 0.02, "hi": 0.98},
      "schedule": {"steps": 400, "beta_start": 0.0002, "beta_end": 0.015},
      "tiling": {"tile": 24, "stride": 6, "histnorm": true},
      "training": {"patch_size": 6, "buckets": 40, "ridge_lambda": 0.01,
                   "samples_per_pair": 500, "seed": 8},
      "sampling_seed": 9,
      "pairs": {"count": 3, "base_seed": 17},
      "scene": {"speckle": {"azimuth_extent": 12.0, "range_extent": 50.0,
                            "cell_spacing": 0.5, "amplitude": 0.8},
                "points": {"count": 4, "amplitude_min": 2.0,
                           "amplitude_max": 6.0, "azimuth_extent": 8.0,
                           "range_extent": 90.0}}
    })";
    write_file_atomic(tmp.file("exp.json"), cfg_json);

    const ExperimentConfig cfg = load_experiment_config(tmp.file("exp.json"));
    CHECK(cfg.radar.platform_velocity == 31.0);
    CHECK(cfg.radar.center_range == 271.5);
    CHECK(cfg.output_dir == "out/exp");
    CHECK(cfg.mask.pattern == MaskPattern::ApertureGap);
    CHECK(cfg.mask.azimuth_ratio == 0.7);
    CHECK(cfg.mask.range_ratio == 0.9);
    CHECK(cfg.mask.seed == 12);
    CHECK(cfg.thermal_sigma == 1.5);
    CHECK(cfg.thermal_seed == 3);
    CHECK(cfg.floor_sigma == 2.5);
    CHECK(cfg.floor_seed == 4);
    CHECK(cfg.looks_azimuth == 5);
    CHECK(cfg.looks_range == 3);
    CHECK(cfg.norm_lo == 0.02);
    CHECK(cfg.norm_hi == 0.98);
    CHECK(cfg.steps == 400);
    CHECK(cfg.beta_start == 0.0002);
    CHECK(cfg.beta_end == 0.015);
    CHECK(cfg.tile == 24);
    CHECK(cfg.stride == 6);
    CHECK(cfg.histnorm);
    CHECK(cfg.training.patch_size == 6);
    CHECK(cfg.training.bucket_count == 40);
    CHECK(cfg.training.ridge_lambda == 0.01);
    CHECK(cfg.training.samples_per_pair == 500);
    CHECK(cfg.training.seed == 8);
    CHECK(cfg.sampling_seed == 9);
    CHECK(cfg.pair_count == 3);
    CHECK(cfg.scene_base_seed == 17);
    CHECK(cfg.scene.speckle_azimuth_extent == 12.0);
    CHECK(cfg.scene.speckle_range_extent == 50.0);
    CHECK(cfg.scene.speckle_cell_spacing == 0.5);
    CHECK(cfg.scene.speckle_amplitude == 0.8);
    CHECK(cfg.scene.point_count == 4);
    CHECK(cfg.scene.point_amplitude_min == 2.0);
    CHECK(cfg.scene.point_amplitude_max == 6.0);
    CHECK(cfg.scene.point_azimuth_extent == 8.0);
    CHECK(cfg.scene.point_range_extent == 90.0);
  }

  TEST_CASE("experiment config rejects typos and omissions") {
    TempDir tmp("sarcs_pipeline_cfg_bad");
    save_radar_params(RadarParams{}, tmp.file("radar.json"));

    write_file_atomic(tmp.file("typo.json"),
                      R"({"radar_path": "radar.json", "outptu_dir": "x"})");
    CHECK(kind_of([&] { load_experiment_config(tmp.file("typo.json")); }) ==
          ErrorKind::Usage);

    write_file_atomic(
        tmp.file("nested.json"),
        R"({"radar_path": "radar.json", "tiling": {"tile": 8, "strdie": 4}})");
    CHECK(kind_of([&] { load_experiment_config(tmp.file("nested.json")); }) ==
          ErrorKind::Usage);

    write_file_atomic(tmp.file("noradar.json"), R"({"output_dir": "x"})");
    CHECK(kind_of([&] { load_experiment_config(tmp.file("noradar.json")); }) ==
          ErrorKind::Usage);
  }

  TEST_CASE("normalized rasters round trip with their dB mapping") {
    TempDir tmp("sarcs_pipeline_norm");
    NormalizedImage img;
    img.pixels = GridD(6, 5);
    img.floor_db = -55.25;
    img.ceil_db = 4.75;
    for (std::size_t i = 0; i < img.pixels.storage().size(); ++i)
      img.pixels.storage()[i] = -0.9 + 0.06 * static_cast<double>(i);

    const std::string path = tmp.file("img.sarc");
    write_normalized(img, path);
    CHECK(std::filesystem::exists(path + ".json"));

    const NormalizedImage back = read_normalized(path);
    REQUIRE(back.pixels.rows() == 6);
    REQUIRE(back.pixels.cols() == 5);
    CHECK(back.floor_db == doctest::Approx(-55.25).epsilon(1e-12));
    CHECK(back.ceil_db == doctest::Approx(4.75).epsilon(1e-12));
    for (std::size_t i = 0; i < back.pixels.storage().size(); ++i)
      CHECK(back.pixels.storage()[i] ==
            doctest::Approx(img.pixels.storage()[i]).epsilon(1e-6));

    // Out-of-range pixels are clamped on read, not trusted.
    img.pixels(0, 0) = 1.75;
    img.pixels(0, 1) = -1.75;
    write_normalized(img, path);
    const NormalizedImage clamped = read_normalized(path);
    CHECK(clamped.pixels(0, 0) == 1.0);
    CHECK(clamped.pixels(0, 1) == -1.0);
  }

  TEST_CASE("sidecar problems surface as data errors") {
    TempDir tmp("sarcs_pipeline_sidecar");
    NormalizedImage img;
    img.pixels = GridD(4, 4);
    img.floor_db = -40.0;
    img.ceil_db = 0.0;
    const std::string path = tmp.file("img.sarc");
    write_normalized(img, path);

    std::filesystem::remove(path + ".json");
    CHECK(kind_of([&] { read_normalized(path); }) == ErrorKind::Data);

    write_file_atomic(path + ".json", R"({"floor_db": -40.0})");
    CHECK(kind_of([&] { read_normalized(path); }) == ErrorKind::Data);

    write_file_atomic(path + ".json", R"({"floor_db": 0.0, "ceil_db": 0.0})");
    CHECK(kind_of([&] { read_normalized(path); }) == ErrorKind::Data);
  }

  TEST_CASE("manifest round trips and resolves paths against its directory") {
    TempDir tmp("sarcs_pipeline_manifest");
    PairManifest m;
    PairEntry a;
    a.clean_path = "p0_clean.sarc";
    a.condition_path = "p0_cond.sarc";
    a.floor_db = -62.5;
    a.ceil_db = -1.5;
    a.mask.pattern = MaskPattern::ApertureGap;
    a.mask.azimuth_ratio = 0.75;
    a.mask.range_ratio = 0.5;
    a.mask.seed = 99;
    a.scene_seed = 1234;
    a.rows = 32;
    a.cols = 48;
    PairEntry b = a;
    b.clean_path = "p1_clean.sarc";
    b.condition_path = "p1_cond.sarc";
    b.mask.pattern = MaskPattern::RandomAzimuth;
    m.pairs = {a, b};
    m.errors = {"pair_0007: simulated failure"};

    const std::string path = tmp.file("manifest.json");
    save_manifest(m, path);
    const PairManifest back = load_manifest(path);

    REQUIRE(back.pairs.size() == 2);
    CHECK(back.pairs[0].clean_path == (tmp.path / "p0_clean.sarc").string());
    CHECK(back.pairs[0].condition_path == (tmp.path / "p0_cond.sarc").string());
    CHECK(back.pairs[1].clean_path == (tmp.path / "p1_clean.sarc").string());
    CHECK(back.pairs[0].floor_db == -62.5);
    CHECK(back.pairs[0].ceil_db == -1.5);
    CHECK(back.pairs[0].mask.pattern == MaskPattern::ApertureGap);
    CHECK(back.pairs[0].mask.azimuth_ratio == 0.75);
    CHECK(back.pairs[0].mask.range_ratio == 0.5);
    CHECK(back.pairs[0].mask.seed == 99);
    CHECK(back.pairs[1].mask.pattern == MaskPattern::RandomAzimuth);
    CHECK(back.pairs[0].scene_seed == 1234);
    CHECK(back.pairs[0].rows == 32);
    CHECK(back.pairs[0].cols == 48);
    REQUIRE(back.errors.size() == 1);
    CHECK(back.errors[0] == "pair_0007: simulated failure");
  }

  TEST_CASE("scene generation follows the recipe") {
    SceneRecipe recipe;
    recipe.point_count = 5;
    recipe.point_amplitude_min = 2.0;
    recipe.point_amplitude_max = 6.0;
    recipe.point_azimuth_extent = 10.0;
    recipe.point_range_extent = 40.0;
    recipe.speckle_amplitude = 0.0;

    const Scene s1 = generate_scene(recipe, 77, 300.0);
    REQUIRE(s1.scatterers.size() == 5);
    CHECK(!s1.reflectivity_grid.has_value());
    for (const auto& sc : s1.scatterers) {
      CHECK(std::abs(sc.azimuth_pos) <= 5.0);
      CHECK(sc.range_pos >= 280.0);
      CHECK(sc.range_pos <= 320.0);
      CHECK(sc.amplitude >= 2.0);
      CHECK(sc.amplitude <= 6.0);
      CHECK(sc.phase >= 0.0);
      CHECK(sc.phase < 2.0 * 3.14159265358979323846);
    }

    const Scene s2 = generate_scene(recipe, 77, 300.0);
    REQUIRE(s2.scatterers.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(s1.scatterers[i].azimuth_pos == s2.scatterers[i].azimuth_pos);
      CHECK(s1.scatterers[i].range_pos == s2.scatterers[i].range_pos);
      CHECK(s1.scatterers[i].amplitude == s2.scatterers[i].amplitude);
      CHECK(s1.scatterers[i].phase == s2.scatterers[i].phase);
    }
    const Scene s3 = generate_scene(recipe, 78, 300.0);
    bool differs = false;
    for (std::size_t i = 0; i < 5; ++i)
      if (s3.scatterers[i].azimuth_pos != s1.scatterers[i].azimuth_pos)
        differs = true;
    CHECK(differs);

    // Speckle appears only when the extent covers at least one cell, and the
    // amplitude scales the reflectivity linearly.
    recipe.speckle_amplitude = 1.0;
    recipe.speckle_azimuth_extent = 4.0;
    recipe.speckle_range_extent = 3.0;
    recipe.speckle_cell_spacing = 1.0;
    const Scene sp1 = generate_scene(recipe, 77, 300.0);
    REQUIRE(sp1.reflectivity_grid.has_value());
    CHECK(sp1.reflectivity_grid->values.rows() == 3);
    CHECK(sp1.reflectivity_grid->values.cols() == 4);
    CHECK(sp1.scatterers.size() == 5);

    recipe.speckle_amplitude = 2.0;
    const Scene sp2 = generate_scene(recipe, 77, 300.0);
    REQUIRE(sp2.reflectivity_grid.has_value());
    const auto& v1 = sp1.reflectivity_grid->values.storage();
    const auto& v2 = sp2.reflectivity_grid->values.storage();
    REQUIRE(v1.size() == v2.size());
    for (std::size_t i = 0; i < v1.size(); ++i)
      CHECK(std::abs(v2[i] - 2.0 * v1[i]) <= 1e-15);

    recipe.speckle_range_extent = 0.5;  // below one cell pitch
    const Scene sp3 = generate_scene(recipe, 77, 300.0);
    CHECK(!sp3.reflectivity_grid.has_value());
  }

  TEST_CASE("pairgen leaves a half-image ghost in the condition only") {
    TempDir tmp("sarcs_pipeline_pairgen");
    const ExperimentConfig cfg = ghost_config(tmp.file("out"));
    const PairManifest manifest = cmd_pairgen(cfg);

    REQUIRE(manifest.pairs.size() == 1);
    CHECK(manifest.errors.empty());
    const PairEntry& e = manifest.pairs[0];
    CHECK(e.rows == 128);
    CHECK(e.cols == 64);
    CHECK(e.mask.seed == derive_seed(cfg.mask.seed, 0));
    CHECK(e.scene_seed == derive_seed(cfg.scene_base_seed, 0));
    CHECK(e.ceil_db > e.floor_db);

    // Reload through the manifest on disk so the relative paths get used.
    const PairManifest loaded =
        load_manifest((std::filesystem::path(cfg.output_dir) / "manifest.json")
                          .string());
    REQUIRE(loaded.pairs.size() == 1);
    const NormalizedImage clean = read_normalized(loaded.pairs[0].clean_path);
    const NormalizedImage cond =
        read_normalized(loaded.pairs[0].condition_path);
    REQUIRE(clean.pixels.rows() == 128);
    REQUIRE(clean.pixels.cols() == 64);

    // Keeping every other pulse of a critically sampled aperture folds the
    // point response onto an alias half the image away in azimuth.
    const double ghost_cond = ghost_ratio(from_normalized(cond), 32);
    const double ghost_clean = ghost_ratio(from_normalized(clean), 32);
    CHECK(ghost_cond > 0.9);
    CHECK(ghost_clean < 0.1);
  }

  TEST_CASE("pairgen is bitwise deterministic") {
    TempDir tmp("sarcs_pipeline_pairgen_det");
    ExperimentConfig cfg = ghost_config(tmp.file("a"));
    cmd_pairgen(cfg);
    cfg.output_dir = tmp.file("b");
    cmd_pairgen(cfg);

    for (const char* name : {"pair_0000_clean.sarc", "pair_0000_cond.sarc"}) {
      const std::string a =
          read_file((std::filesystem::path(tmp.file("a")) / name).string(),
                    ErrorKind::Data);
      const std::string b =
          read_file((std::filesystem::path(tmp.file("b")) / name).string(),
                    ErrorKind::Data);
      CHECK(a == b);
    }
  }

  TEST_CASE("train then reconstruct closes the loop on an identity task") {
    TempDir tmp("sarcs_pipeline_loop");
    PairManifest m;
    for (std::size_t k = 0; k < 6; ++k) {
      const NormalizedImage img = smooth_image(24, k);
      char stem[16];
      std::snprintf(stem, sizeof stem, "t%zu", k);
      PairEntry e;
      e.clean_path = std::string(stem) + "_clean.sarc";
      e.condition_path = std::string(stem) + "_cond.sarc";
      e.floor_db = img.floor_db;
      e.ceil_db = img.ceil_db;
      e.rows = 24;
      e.cols = 24;
      write_normalized(img, (tmp.path / e.clean_path).string());
      write_normalized(img, (tmp.path / e.condition_path).string());
      m.pairs.push_back(e);
    }
    const std::string manifest_path = tmp.file("manifest.json");
    save_manifest(m, manifest_path);

    ExperimentConfig cfg;
    cfg.steps = 1000;
    cfg.beta_start = 1e-4;
    cfg.beta_end = 0.02;
    cfg.training.patch_size = 4;
    cfg.training.bucket_count = 100;
    cfg.training.ridge_lambda = 1e-3;
    cfg.training.samples_per_pair = 3000;
    cfg.training.seed = 9;
    cfg.tile = 12;
    cfg.stride = 4;
    cfg.histnorm = false;
    cfg.sampling_seed = 3;

    const std::string model_path = tmp.file("model.sarm");
    TrainReport report;
    cmd_train(cfg, manifest_path, model_path, &report);
    CHECK(report.heldout_count == 6 * 3000 / 8);
    CHECK(report.heldout_mse < 0.2);
    CHECK(report.empty_buckets.empty());

    const std::string recon_path = tmp.file("recon.sarc");
    cmd_reconstruct(cfg, tmp.file("t0_cond.sarc"), model_path, recon_path);
    const EvalReport ev = cmd_eval(recon_path, tmp.file("t0_clean.sarc"),
                                   tmp.file("t0_cond.sarc"));
    // With the truth handed over as condition the sampler should settle
    // close to it; 20 dB on a [-1,1] scale is an RMSE of 0.2.
    CHECK(ev.psnr_recon >= 20.0);
    CHECK(ev.ssim_recon > 0.7);

    ExperimentConfig wrong = cfg;
    wrong.steps = 500;
    CHECK(kind_of([&] {
            cmd_reconstruct(wrong, tmp.file("t0_cond.sarc"), model_path,
                            tmp.file("recon2.sarc"));
          }) == ErrorKind::Usage);
  }

  TEST_CASE("eval of identical images reports the degenerate fixed point") {
    TempDir tmp("sarcs_pipeline_eval");
    NormalizedImage img;
    img.pixels = GridD(16, 16, -1.0);
    img.pixels(5, 3) = 1.0;
    img.floor_db = -50.0;
    img.ceil_db = 0.0;
    const std::string path = tmp.file("img.sarc");
    write_normalized(img, path);

    const EvalReport r = cmd_eval(path, path, path);
    CHECK(std::isinf(r.psnr_recon));
    CHECK(r.psnr_recon > 0.0);
    CHECK(std::isinf(r.psnr_condition));
    CHECK(r.ssim_recon == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.ghost_recon == r.ghost_condition);
    CHECK(r.ghost_offset == 8);

    const std::string json_text = eval_report_json(r);
    CHECK(json_text.find("\"+inf\"") != std::string::npos);
    CHECK(json_text.find("\"ghost_offset\": 8") != std::string::npos);

    const EvalReport shifted = cmd_eval(path, path, path, 5);
    CHECK(shifted.ghost_offset == 5);
  }
}
