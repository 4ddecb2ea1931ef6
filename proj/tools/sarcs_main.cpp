// Command-line front end for the compressive SAR imaging pipeline.
// Subcommands cover simulation, masking, focusing, multilook, dataset
// generation, training, tiled reconstruction, evaluation and PGM export.
// --config loads an experiment JSON; explicit flags override its values.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sarcs/cond_denoiser.hpp"
#include "sarcs/diffusion.hpp"
#include "sarcs/errors.hpp"
#include "sarcs/fsio.hpp"
#include "sarcs/focusing.hpp"
#include "sarcs/imagery.hpp"
#include "sarcs/patchwork.hpp"
#include "sarcs/pipeline.hpp"
#include "sarcs/radar.hpp"
#include "sarcs/sampling.hpp"

namespace {

int exit_code(sarcs::ErrorKind kind) {
  switch (kind) {
    case sarcs::ErrorKind::Usage: return 1;
    case sarcs::ErrorKind::Data: return 2;
    default: return 3;
  }
}

std::string find_config_arg(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

struct Cli {
  sarcs::ExperimentConfig cfg;
  bool have_config = false;
  std::string config_path;

  sarcs::RadarParams radar_for(const std::string& radar_flag) const {
    if (!radar_flag.empty()) return sarcs::load_radar_params(radar_flag);
    sarcs::require(have_config, sarcs::ErrorKind::Usage,
                   "no radar parameters: pass --radar or --config");
    return cfg.radar;
  }
};

void add_config_flag(CLI::App* cmd, Cli& cli) {
  cmd->add_option("--config", cli.config_path,
                  "experiment JSON document (already loaded; flags override)");
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  CLI::App app{"desk-scale compressive SAR imaging pipeline"};
  app.require_subcommand(1);

  Cli cli;
  try {
    const std::string cfg_path = find_config_arg(args);
    if (!cfg_path.empty()) {
      cli.cfg = sarcs::load_experiment_config(cfg_path);
      cli.have_config = true;
    }
  } catch (const sarcs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  }

  // simulate
  auto* sim = app.add_subcommand("simulate", "synthesize a phase history");
  std::string sim_radar, sim_scene, sim_out;
  double sim_sigma = cli.cfg.thermal_sigma;
  std::uint64_t sim_seed = cli.cfg.thermal_seed;
  add_config_flag(sim, cli);
  sim->add_option("--radar", sim_radar, "radar parameter JSON");
  sim->add_option("--scene", sim_scene, "scene JSON")->required();
  sim->add_option("--out", sim_out, "output cf32 raster")->required();
  sim->add_option("--noise-sigma", sim_sigma, "thermal noise std");
  sim->add_option("--seed", sim_seed, "thermal noise seed");

  // mask
  auto* msk = app.add_subcommand("mask", "build a sampling mask, optionally apply it");
  std::string msk_pattern = sarcs::mask_pattern_name(cli.cfg.mask.pattern);
  double msk_az = cli.cfg.mask.azimuth_ratio, msk_rg = cli.cfg.mask.range_ratio;
  std::uint64_t msk_seed = cli.cfg.mask.seed;
  std::uint64_t msk_apply_seed = cli.cfg.floor_seed;
  double msk_floor = cli.cfg.floor_sigma;
  std::size_t msk_rows = cli.cfg.radar.num_range_samples;
  std::size_t msk_cols = cli.cfg.radar.num_pulses;
  std::string msk_out, msk_input, msk_masked_out;
  add_config_flag(msk, cli);
  msk->add_option("--pattern", msk_pattern,
                  "regular_azimuth | regular_azimuth_random_range | "
                  "random_azimuth | aperture_gap");
  msk->add_option("--azimuth-ratio", msk_az, "retained azimuth fraction");
  msk->add_option("--range-ratio", msk_rg, "retained range fraction (pattern b)");
  msk->add_option("--seed", msk_seed, "mask seed");
  msk->add_option("--rows", msk_rows, "mask rows");
  msk->add_option("--cols", msk_cols, "mask cols");
  msk->add_option("--out", msk_out, "mask u8 raster (sidecar <out>.json)");
  msk->add_option("--input", msk_input, "phase history to subsample (cf32)");
  msk->add_option("--masked-out", msk_masked_out, "masked phase history output");
  msk->add_option("--floor-sigma", msk_floor, "noise floor std for dropped cells");
  msk->add_option("--apply-seed", msk_apply_seed, "noise floor seed");

  // focus
  auto* foc = app.add_subcommand("focus", "form a complex image");
  std::string foc_input, foc_radar, foc_out, foc_alg = "rma";
  std::size_t foc_rows = 0, foc_cols = 0;
  add_config_flag(foc, cli);
  foc->add_option("--input", foc_input, "phase history (cf32)")->required();
  foc->add_option("--radar", foc_radar, "radar parameter JSON");
  foc->add_option("--algorithm", foc_alg, "rma | backprojection");
  foc->add_option("--grid-rows", foc_rows, "backprojection grid rows");
  foc->add_option("--grid-cols", foc_cols, "backprojection grid cols");
  foc->add_option("--out", foc_out, "output cf32 raster")->required();

  // multilook
  auto* ml = app.add_subcommand("multilook", "incoherent block averaging");
  std::string ml_input, ml_out;
  std::size_t ml_az = cli.cfg.looks_azimuth, ml_rg = cli.cfg.looks_range;
  add_config_flag(ml, cli);
  ml->add_option("--input", ml_input, "complex image (cf32)")->required();
  ml->add_option("--looks-azimuth", ml_az, "azimuth looks");
  ml->add_option("--looks-range", ml_rg, "range looks");
  ml->add_option("--out", ml_out, "output f32r raster")->required();

  // pairgen
  auto* pg = app.add_subcommand("pairgen", "generate matched training pairs");
  std::string pg_outdir;
  std::size_t pg_count = 0;
  std::uint64_t pg_seed = 0;
  bool pg_have_seed = false, pg_have_count = false;
  add_config_flag(pg, cli);
  pg->add_option("--output-dir", pg_outdir, "output directory override");
  pg->add_option("--count", pg_count, "pair count override")
      ->each([&](const std::string&) { pg_have_count = true; });
  pg->add_option("--base-seed", pg_seed, "scene seed base override")
      ->each([&](const std::string&) { pg_have_seed = true; });

  // train
  auto* tr = app.add_subcommand("train", "fit the patch regressor");
  std::string tr_manifest, tr_out;
  add_config_flag(tr, cli);
  tr->add_option("--manifest", tr_manifest, "pair manifest JSON");
  tr->add_option("--out", tr_out, "model output path (SARM)");

  // reconstruct
  auto* rc = app.add_subcommand("reconstruct", "tiled conditional sampling");
  std::string rc_condition, rc_model, rc_out, rc_pgm;
  std::size_t rc_tile = cli.cfg.tile, rc_stride = cli.cfg.stride;
  std::uint64_t rc_seed = cli.cfg.sampling_seed;
  bool rc_histnorm = cli.cfg.histnorm;
  add_config_flag(rc, cli);
  rc->add_option("--condition", rc_condition, "condition raster (f32r + sidecar)")
      ->required();
  rc->add_option("--model", rc_model, "trained SARM model");
  rc->add_option("--out", rc_out, "reconstruction output");
  rc->add_option("--pgm", rc_pgm, "also export a 16-bit PGM");
  rc->add_option("--tile", rc_tile, "tile size");
  rc->add_option("--stride", rc_stride, "tile stride");
  rc->add_flag("--histnorm,!--no-histnorm", rc_histnorm,
               "histogram-normalize tiles against the condition");
  rc->add_option("--seed", rc_seed, "sampling seed");

  // eval
  auto* ev = app.add_subcommand("eval", "metrics report for a reconstruction");
  std::string ev_recon, ev_clean, ev_cond, ev_out;
  std::int64_t ev_offset = -1;
  add_config_flag(ev, cli);
  ev->add_option("--recon", ev_recon, "reconstruction raster")->required();
  ev->add_option("--clean", ev_clean, "clean reference raster")->required();
  ev->add_option("--condition", ev_cond, "condition raster")->required();
  ev->add_option("--ghost-offset", ev_offset, "azimuth ghost offset (default cols/2)");
  ev->add_option("--out", ev_out, "also write the JSON report here");

  // export-pgm
  auto* xp = app.add_subcommand("export-pgm", "render a raster as 16-bit PGM");
  std::string xp_input, xp_out;
  bool xp_normalized = false;
  add_config_flag(xp, cli);
  xp->add_option("--input", xp_input, "raster (cf32/f32r/u8)")->required();
  xp->add_option("--out", xp_out, "PGM output path")->required();
  xp->add_flag("--normalized", xp_normalized,
               "treat f32r input as a [-1,1] normalized image");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc_code = app.exit(e);
    return rc_code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) {
      const sarcs::RadarParams radar = cli.radar_for(sim_radar);
      const sarcs::Scene scene = sarcs::load_scene(sim_scene);
      const sarcs::PhaseHistory ph =
          sarcs::simulate_phase_history(scene, radar, sim_sigma, sim_seed);
      sarcs::write_raster(ph.samples, sim_out);
      std::cout << "wrote " << sim_out << " (" << ph.samples.rows() << "x"
                << ph.samples.cols() << ")\n";
    } else if (msk->parsed()) {
      sarcs::require(!msk_out.empty() || !msk_input.empty(),
                     sarcs::ErrorKind::Usage,
                     "mask: pass --out and/or --input with --masked-out");
      sarcs::GridC input;
      if (!msk_input.empty()) {
        input = sarcs::read_cf32(msk_input);
        msk_rows = input.rows();
        msk_cols = input.cols();
      }
      const sarcs::SamplingMask mask = sarcs::build_mask(
          sarcs::mask_pattern_from_name(msk_pattern), msk_az, msk_rg, msk_rows,
          msk_cols, msk_seed);
      if (!msk_out.empty()) {
        sarcs::save_mask(mask, msk_out, msk_out + ".json");
        std::cout << "wrote " << msk_out << " (retained fraction "
                  << sarcs::retained_fraction(mask) << ")\n";
      }
      if (!msk_input.empty()) {
        sarcs::require(!msk_masked_out.empty(), sarcs::ErrorKind::Usage,
                       "mask: --input requires --masked-out");
        sarcs::PhaseHistory ph;
        ph.samples = std::move(input);
        if (cli.have_config) ph.params = cli.cfg.radar;
        ph.params.num_range_samples = ph.samples.rows();
        ph.params.num_pulses = ph.samples.cols();
        const sarcs::PhaseHistory masked =
            sarcs::apply_mask(ph, mask, msk_floor, msk_apply_seed);
        sarcs::write_raster(masked.samples, msk_masked_out);
        std::cout << "wrote " << msk_masked_out << "\n";
      }
    } else if (foc->parsed()) {
      sarcs::PhaseHistory ph;
      ph.samples = sarcs::read_cf32(foc_input);
      ph.params = cli.radar_for(foc_radar);
      ph.params.num_range_samples = ph.samples.rows();
      ph.params.num_pulses = ph.samples.cols();
      sarcs::ComplexImage img;
      if (foc_alg == "rma") {
        img = sarcs::focus_rma(ph);
      } else if (foc_alg == "backprojection" || foc_alg == "bp") {
        const std::size_t rows = foc_rows ? foc_rows : ph.samples.rows();
        const std::size_t cols = foc_cols ? foc_cols : ph.samples.cols();
        img = sarcs::focus_backprojection(ph, rows, cols);
      } else {
        throw sarcs::Error(sarcs::ErrorKind::Usage,
                           "unknown focusing algorithm \"" + foc_alg + "\"");
      }
      sarcs::write_raster(img.pixels, foc_out);
      std::cout << "wrote " << foc_out << "\n";
    } else if (ml->parsed()) {
      sarcs::ComplexImage img;
      img.pixels = sarcs::read_cf32(ml_input);
      const sarcs::IntensityImage result = sarcs::multilook(img, ml_az, ml_rg);
      sarcs::write_raster(result.pixels, ml_out);
      std::cout << "wrote " << ml_out << " (" << result.pixels.rows() << "x"
                << result.pixels.cols() << ")\n";
    } else if (pg->parsed()) {
      sarcs::require(cli.have_config, sarcs::ErrorKind::Usage,
                     "pairgen requires --config");
      if (!pg_outdir.empty()) cli.cfg.output_dir = pg_outdir;
      if (pg_have_count) cli.cfg.pair_count = pg_count;
      if (pg_have_seed) cli.cfg.scene_base_seed = pg_seed;
      const sarcs::PairManifest m = sarcs::cmd_pairgen(cli.cfg);
      std::cout << "wrote " << m.pairs.size() << " pairs to " << cli.cfg.output_dir
                << (m.errors.empty()
                        ? std::string{}
                        : " (" + std::to_string(m.errors.size()) + " failed)")
                << "\n";
    } else if (tr->parsed()) {
      sarcs::require(cli.have_config, sarcs::ErrorKind::Usage,
                     "train requires --config");
      namespace fs = std::filesystem;
      if (tr_manifest.empty())
        tr_manifest = (fs::path(cli.cfg.output_dir) / "manifest.json").string();
      if (tr_out.empty())
        tr_out = (fs::path(cli.cfg.output_dir) / "model.sarm").string();
      sarcs::cmd_train(cli.cfg, tr_manifest, tr_out);
      std::cout << "wrote " << tr_out << "\n";
    } else if (rc->parsed()) {
      sarcs::require(cli.have_config, sarcs::ErrorKind::Usage,
                     "reconstruct requires --config");
      namespace fs = std::filesystem;
      cli.cfg.tile = rc_tile;
      cli.cfg.stride = rc_stride;
      cli.cfg.histnorm = rc_histnorm;
      cli.cfg.sampling_seed = rc_seed;
      if (rc_model.empty())
        rc_model = (fs::path(cli.cfg.output_dir) / "model.sarm").string();
      if (rc_out.empty())
        rc_out = (fs::path(cli.cfg.output_dir) / "recon.sarc").string();
      sarcs::cmd_reconstruct(cli.cfg, rc_condition, rc_model, rc_out);
      if (!rc_pgm.empty())
        sarcs::export_pgm(sarcs::read_normalized(rc_out), rc_pgm);
      std::cout << "wrote " << rc_out << "\n";
    } else if (ev->parsed()) {
      std::optional<std::size_t> offset;
      if (ev_offset >= 0) offset = static_cast<std::size_t>(ev_offset);
      const sarcs::EvalReport r = sarcs::cmd_eval(ev_recon, ev_clean, ev_cond, offset);
      const std::string report = sarcs::eval_report_json(r);
      std::cout << report;
      if (!ev_out.empty()) sarcs::write_file_atomic(ev_out, report);
    } else if (xp->parsed()) {
      const sarcs::RasterHeader h = sarcs::peek_raster(xp_input);
      if (h.dtype == sarcs::RasterDtype::cf32) {
        const sarcs::GridC g = sarcs::read_cf32(xp_input);
        sarcs::IntensityImage img;
        img.pixels = sarcs::GridD(g.rows(), g.cols());
        for (std::size_t i = 0; i < g.size(); ++i)
          img.pixels.storage()[i] = std::norm(g.storage()[i]);
        sarcs::export_pgm(img, xp_out);
      } else if (h.dtype == sarcs::RasterDtype::f32r) {
        if (xp_normalized) {
          sarcs::NormalizedImage img;
          img.pixels = sarcs::read_f32r(xp_input);
          sarcs::export_pgm(img, xp_out);
        } else {
          sarcs::IntensityImage img;
          img.pixels = sarcs::read_f32r(xp_input);
          sarcs::export_pgm(img, xp_out);
        }
      } else {
        const sarcs::GridU8 g = sarcs::read_u8(xp_input);
        sarcs::IntensityImage img;
        img.pixels = sarcs::GridD(g.rows(), g.cols());
        for (std::size_t i = 0; i < g.size(); ++i)
          img.pixels.storage()[i] = static_cast<double>(g.storage()[i]);
        sarcs::export_pgm(img, xp_out);
      }
      std::cout << "wrote " << xp_out << "\n";
    }
  } catch (const sarcs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
