// patchglr command-line front end: dictionary building, pairwise matching,
// ROC detection experiments and dictionary-based denoising.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "patchglr/criteria.hpp"
#include "patchglr/denoise.hpp"
#include "patchglr/dictionary.hpp"
#include "patchglr/eval.hpp"
#include "patchglr/image_io.hpp"
#include "patchglr/noise.hpp"
#include "patchglr/texture.hpp"

namespace fs = std::filesystem;
using namespace patchglr;

namespace {

// Exit codes: 1 usage, 2 I/O, 3 numeric/convergence.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Write through a temp file and rename, so failed runs leave no partial output.
template <typename Fn>
void atomic_write(const fs::path& path, Fn&& fn) {
  fs::path tmp = path;
  tmp += ".tmp";
  try {
    fn(tmp);
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

struct NoiseFlags {
  std::string noise = "gaussian";
  double sigma = -1.0;
  double looks = -1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--noise", noise, "Noise family: gaussian, gamma, poisson")
        ->capture_default_str()
        ->check(CLI::IsMember({"gaussian", "gamma", "poisson"}));
    cmd->add_option("--sigma", sigma, "Gaussian noise std-dev");
    cmd->add_option("--looks", looks, "Gamma shape parameter L");
  }

  NoiseKind kind() const {
    if (noise == "gaussian") return NoiseKind::Gaussian;
    if (noise == "gamma") return NoiseKind::Gamma;
    return NoiseKind::Poisson;
  }

  /// Model from explicit flags; snr-db based calibration is handled by `roc`.
  NoiseModel model() const {
    switch (kind()) {
      case NoiseKind::Gaussian:
        if (sigma < 0.0) throw UsageError("--noise gaussian requires --sigma");
        return NoiseModel::gaussian(sigma);
      case NoiseKind::Gamma:
        if (looks < 0.0) throw UsageError("--noise gamma requires --looks");
        return NoiseModel::gamma(looks);
      case NoiseKind::Poisson:
        return NoiseModel::poisson();
    }
    throw UsageError("unknown noise family");
  }
};

TransformFamily family_for(const std::string& flag, NoiseKind kind) {
  if (flag == "affine") return TransformFamily::Affine;
  if (flag == "log-affine") return TransformFamily::LogAffine;
  if (!flag.empty()) throw UsageError("unknown --family " + flag);
  return kind == NoiseKind::Gaussian ? TransformFamily::Affine : TransformFamily::LogAffine;
}

/// Gamma/Poisson pipelines need strictly positive atoms.
Dictionary prepared_dictionary(const fs::path& path, NoiseKind kind) {
  Dictionary dict = load_dictionary(path);
  if (kind != NoiseKind::Gaussian && !dict.empty())
    dict = floored(std::move(dict), positive_floor_epsilon(dict));
  return dict;
}

/// Format dispatch happens on the FINAL path; atomic_write hands us a
/// temp path whose extension would otherwise pick the wrong writer.
void write_image_atomically(const fs::path& path, const Image& img, int maxval) {
  const bool as_pgm = path.extension() == ".pgm";
  atomic_write(path, [&](const fs::path& tmp) {
    if (as_pgm)
      write_pgm(tmp, img, maxval);
    else
      write_matrix(tmp, img);
  });
}

int run_texture(const fs::path& out, int width, int height, std::uint64_t seed) {
  const Image img = make_texture(width, height, seed);
  atomic_write(out, [&](const fs::path& p) { write_pgm(p, img, 255); });
  std::printf("texture=%dx%d out=%s\n", width, height, out.string().c_str());
  return 0;
}

int run_dict_build(const fs::path& image_path, const fs::path& out, int k, int patch, int stride,
                   std::uint64_t seed, int kmeans_iters) {
  const Image img = read_image(image_path);
  const auto patches = extract_patches(img, patch, patch, stride);
  const Dictionary dict = kmeans_dictionary(patches, k, seed, kmeans_iters);
  atomic_write(out, [&](const fs::path& p) { save_dictionary(dict, p); });
  std::printf("atoms=%zu patch=%dx%d training_patches=%zu\n", dict.size(), patch, patch,
              patches.size());
  return 0;
}

int run_match(const fs::path& dict_path, const fs::path& input, const NoiseFlags& noise,
              const std::string& criterion, const fs::path& scores_out) {
  const NoiseModel model = noise.model();
  const Dictionary dict = prepared_dictionary(dict_path, model.kind);
  if (dict.empty()) throw InvalidInputError("match: empty dictionary");
  const Image img = read_image(input);
  if (img.width != dict.patch_width || img.height != dict.patch_height)
    throw InvalidInputError("match: input dimensions must equal the atom dimensions");
  const Patch x(img.width, img.height, img.pixels);
  const Criterion c = criterion_from_name(criterion);

  if (!scores_out.empty()) {
    atomic_write(scores_out, [&](const fs::path& p) {
      std::ofstream os(p);
      if (!os) throw IoError("match: cannot open " + p.string());
      os << "atom,score\n";
      char line[64];
      for (std::size_t j = 0; j < dict.size(); ++j) {
        std::snprintf(line, sizeof(line), "%zu,%.17g\n", j, evaluate(c, model, x, dict[j]).value);
        os << line;
      }
    });
  }
  const std::size_t best = best_match(c, model, x, dict);
  const MatchScore s = evaluate(c, model, x, dict[best]);
  if (s.fitted)
    std::printf("atom=%zu score=%.6f alpha=%.6g beta=%.6g\n", best, s.value, s.fitted->alpha,
                s.fitted->beta);
  else
    std::printf("atom=%zu score=%.6f\n", best, s.value);
  return 0;
}

int run_roc(const fs::path& dict_path, const fs::path& out, const NoiseFlags& noise,
            const std::string& criterion, const std::string& family_flag,
            std::optional<double> snr_db, int trials, double nu, std::uint64_t seed, int threads,
            const fs::path& pairs_out, std::optional<double> alpha_min,
            std::optional<double> alpha_max, std::optional<double> beta_min,
            std::optional<double> beta_max) {
  const NoiseKind kind = noise.kind();
  Dictionary dict = prepared_dictionary(dict_path, kind);

  NoiseModel model = NoiseModel::gaussian(1.0);
  if (snr_db) {
    const SnrCalibration cal = calibrate_snr(kind, dict, *snr_db);
    model = cal.model;
    if (cal.theta_scale != 1.0) dict = scaled(std::move(dict), cal.theta_scale);
  } else {
    model = noise.model();
  }

  ExperimentConfig cfg = ExperimentConfig::defaults(criterion_from_name(criterion),
                                                    family_for(family_flag, kind));
  cfg.trials = trials;
  cfg.nu = nu;
  cfg.seed = seed;
  cfg.threads = threads;
  if (alpha_min) cfg.alpha_range.lo = *alpha_min;
  if (alpha_max) cfg.alpha_range.hi = *alpha_max;
  if (beta_min) cfg.beta_range.lo = *beta_min;
  if (beta_max) cfg.beta_range.hi = *beta_max;

  const auto pairs = run_detection_experiment(dict, model, cfg);
  const RocCurve curve = roc(pairs);
  atomic_write(out, [&](const fs::path& p) { write_roc_csv(p, curve); });
  if (!pairs_out.empty())
    atomic_write(pairs_out, [&](const fs::path& p) { write_pairs_csv(p, pairs); });
  std::printf("auc=%.6f\n", curve.auc);
  return 0;
}

int run_denoise(const fs::path& dict_path, const fs::path& input, const fs::path& out,
                const NoiseFlags& noise, const std::string& criterion,
                const std::string& family_flag, int stride, double temperature, int threads,
                const fs::path& clean_path, int maxval) {
  const NoiseModel model = noise.model();
  const Dictionary dict = prepared_dictionary(dict_path, model.kind);
  const Image noisy = read_image(input);

  DenoiseOptions opts;
  opts.family = family_for(family_flag, model.kind);
  opts.criterion = criterion_from_name(criterion);
  opts.stride = stride;
  opts.temperature = temperature;
  opts.threads = threads;

  DenoiseReport report;
  const Image denoised = denoise_image(noisy, dict, model, opts, &report);
  write_image_atomically(out, denoised, maxval);

  std::string line;
  char buf[256];
  if (!clean_path.empty()) {
    const Image clean = read_image(clean_path);
    report.psnr_noisy = psnr(clean, noisy);
    report.psnr_denoised = psnr(clean, denoised);
    std::snprintf(buf, sizeof(buf), "psnr=%g psnr_noisy=%g ", report.psnr_denoised,
                  report.psnr_noisy);
    line += buf;
  }
  std::snprintf(buf, sizeof(buf), "z_min=%g z_max=%g z_mean=%g skipped=%d", report.z_min,
                report.z_max, report.z_mean, report.skipped_atoms);
  line += buf;
  std::printf("%s\n", line.c_str());
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contrast-invariant template matching under Gaussian, gamma and Poisson noise"};
  app.require_subcommand(1);

  // texture
  auto* tex = app.add_subcommand("texture", "Write the bundled synthetic texture as PGM");
  fs::path tex_out;
  int tex_w = 256, tex_h = 256;
  std::uint64_t tex_seed = 1;
  tex->add_option("--out", tex_out, "Output PGM path")->required();
  tex->add_option("--width", tex_w, "Texture width")->capture_default_str();
  tex->add_option("--height", tex_h, "Texture height")->capture_default_str();
  tex->add_option("--seed", tex_seed, "Texture seed")->capture_default_str();

  // dict-build
  auto* db = app.add_subcommand("dict-build", "k-means patch dictionary from an image");
  fs::path db_image, db_out;
  int db_k = 196, db_patch = 8, db_stride = 4, db_iters = 100;
  std::uint64_t db_seed = 1;
  db->add_option("--image", db_image, "Training image (PGM or matrix)")->required();
  db->add_option("--out", db_out, "Output dictionary (.pglrd)")->required();
  db->add_option("--k", db_k, "Number of atoms")->capture_default_str();
  db->add_option("--patch", db_patch, "Patch side length")->capture_default_str();
  db->add_option("--stride", db_stride, "Training extraction stride")->capture_default_str();
  db->add_option("--seed", db_seed, "k-means seed")->capture_default_str();
  db->add_option("--kmeans-iters", db_iters, "Maximum Lloyd iterations")->capture_default_str();

  // match
  auto* mt = app.add_subcommand("match", "Score one patch against every atom");
  fs::path mt_dict, mt_input, mt_scores;
  NoiseFlags mt_noise;
  std::string mt_criterion = "glr";
  mt->add_option("--dict", mt_dict, "Dictionary file")->required();
  mt->add_option("--input", mt_input, "Patch image, dimensions equal to the atoms")->required();
  mt_noise.attach(mt);
  mt->add_option("--criterion", mt_criterion, "corr, glr, stab-corr, stab-glr")
      ->capture_default_str()
      ->check(CLI::IsMember({"corr", "glr", "stab-corr", "stab-glr"}));
  mt->add_option("--all-scores", mt_scores, "Optional CSV of every atom score");

  // roc
  auto* rc = app.add_subcommand("roc", "Detection experiment and ROC curve");
  fs::path rc_dict, rc_out, rc_pairs;
  NoiseFlags rc_noise;
  std::string rc_criterion = "glr", rc_family;
  int rc_trials = 20, rc_threads = 0;
  double rc_nu = 0.02;
  std::uint64_t rc_seed = 1;
  std::optional<double> rc_snr, rc_amin, rc_amax, rc_bmin, rc_bmax;
  rc->add_option("--dict", rc_dict, "Dictionary file")->required();
  rc->add_option("--out", rc_out, "Output ROC CSV")->required();
  rc_noise.attach(rc);
  rc->add_option("--criterion", rc_criterion, "corr, glr, stab-corr, stab-glr")
      ->capture_default_str()
      ->check(CLI::IsMember({"corr", "glr", "stab-corr", "stab-glr"}));
  rc->add_option("--family", rc_family, "affine or log-affine (default from noise)");
  rc->add_option("--snr-db", rc_snr, "Calibrate noise strength to this dictionary SNR (dB)");
  rc->add_option("--trials", rc_trials, "Independent noise/transform repetitions")->capture_default_str();
  rc->add_option("--nu", rc_nu, "KL threshold of the relaxed H0")->capture_default_str();
  rc->add_option("--seed", rc_seed, "Master experiment seed")->capture_default_str();
  rc->add_option("--threads", rc_threads, "Worker threads (0 = auto)")->capture_default_str();
  rc->add_option("--pairs-out", rc_pairs, "Optional labeled-pairs CSV");
  rc->add_option("--alpha-min", rc_amin, "Transform alpha range low");
  rc->add_option("--alpha-max", rc_amax, "Transform alpha range high");
  rc->add_option("--beta-min", rc_bmin, "Transform beta range low");
  rc->add_option("--beta-max", rc_bmax, "Transform beta range high");

  // denoise
  auto* dn = app.add_subcommand("denoise", "Dictionary-based posterior-mean denoiser");
  fs::path dn_dict, dn_input, dn_out, dn_clean;
  NoiseFlags dn_noise;
  std::string dn_criterion = "glr", dn_family;
  int dn_stride = 4, dn_threads = 0, dn_maxval = 255;
  double dn_temperature = 1.0;
  dn->add_option("--dict", dn_dict, "Dictionary file")->required();
  dn->add_option("--input", dn_input, "Noisy image (PGM or matrix)")->required();
  dn->add_option("--out", dn_out, "Denoised output (.pgm or matrix)")->required();
  dn_noise.attach(dn);
  dn->add_option("--criterion", dn_criterion, "glr or stab-glr")
      ->capture_default_str()
      ->check(CLI::IsMember({"glr", "stab-glr"}));
  dn->add_option("--family", dn_family, "affine or log-affine (default from noise)");
  dn->add_option("--stride", dn_stride, "Denoising patch stride")->capture_default_str();
  dn->add_option("--temperature", dn_temperature, "Weight temperature (1 = plain GLR)")->capture_default_str();
  dn->add_option("--threads", dn_threads, "Worker threads (0 = auto)")->capture_default_str();
  dn->add_option("--clean", dn_clean, "Reference clean image for PSNR reporting");
  dn->add_option("--maxval", dn_maxval, "PGM output maxval")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e); // prints usage, exits 0
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (tex->parsed()) return run_texture(tex_out, tex_w, tex_h, tex_seed);
    if (db->parsed())
      return run_dict_build(db_image, db_out, db_k, db_patch, db_stride, db_seed, db_iters);
    if (mt->parsed()) return run_match(mt_dict, mt_input, mt_noise, mt_criterion, mt_scores);
    if (rc->parsed())
      return run_roc(rc_dict, rc_out, rc_noise, rc_criterion, rc_family, rc_snr, rc_trials, rc_nu,
                     rc_seed, rc_threads, rc_pairs, rc_amin, rc_amax, rc_bmin, rc_bmax);
    if (dn->parsed())
      return run_denoise(dn_dict, dn_input, dn_out, dn_noise, dn_criterion, dn_family, dn_stride,
                         dn_temperature, dn_threads, dn_clean, dn_maxval);
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
