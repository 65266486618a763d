#pragma once

#include "patchglr/criteria.hpp"
#include "patchglr/dictionary.hpp"
#include "patchglr/noise.hpp"

namespace patchglr {

struct DenoiseOptions {
  TransformFamily family = TransformFamily::Affine;
  Criterion criterion = Criterion::Glr; // Glr or StabilizedGlr
  double temperature = 1.0;             // 1 = plain GLR weights
  int stride = 4;
  int threads = 0;
  NewtonConfig newton;
};

struct PatchDenoiseResult {
  Patch estimate;
  double z = 0.0;        // normalizer of the shifted weights (>= 1 by construction)
  int skipped_atoms = 0; // degenerate atoms excluded from the average
};

/// GLR-weighted posterior mean: theta_hat = (1/Z) sum_j w_j * T_j(a_j) with
/// w_j = G(x, a_j)^(1/temperature) and T_j the transform fitted while scoring
/// atom j. Weights are computed in the log domain, shifted by the smallest
/// neg-log-GLR before exponentiation.
PatchDenoiseResult denoise_patch(const Patch& x, const Dictionary& dict, const NoiseModel& model,
                                 const DenoiseOptions& opts);

struct DenoiseReport {
  double psnr_noisy = 0.0;
  double psnr_denoised = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;
  double z_mean = 0.0;
  int skipped_atoms = 0;
};

/// Patch-wise denoising with uniform averaging of overlapping estimates.
/// Patch positions are the stride grid plus the final row/column so the
/// whole image is covered. Per-pixel aggregation runs in a fixed order.
Image denoise_image(const Image& noisy, const Dictionary& dict, const NoiseModel& model,
                    const DenoiseOptions& opts, DenoiseReport* report = nullptr);

/// 10*log10(peak^2 / MSE) with peak = max value of clean.
/// Identical images yield +infinity.
double psnr(const Image& clean, const Image& test);

} // namespace patchglr
