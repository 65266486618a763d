#include "patchglr/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "patchglr/parallel.hpp"

namespace patchglr {

namespace {

/// Fitted atom in the intensity domain. For the stabilized path the affine
/// fit lives in the stabilizer's domain and is mapped back through its
/// inverse (exp for the gamma log, inverse Anscombe for Poisson).
Patch fitted_atom(Criterion criterion, const NoiseModel& model, const Patch& atom,
                  const MatchScore& score) {
  const RadiometricTransform& t = *score.fitted;
  if (criterion == Criterion::Glr || model.kind == NoiseKind::Gaussian)
    return apply(t, atom);
  Patch out = atom;
  if (model.kind == NoiseKind::Gamma) {
    for (double& v : out.values) v = std::exp(t.alpha * std::log(v) + t.beta);
  } else {
    for (double& v : out.values) {
      const double s = std::max(t.alpha * 2.0 * std::sqrt(v + 0.375) + t.beta, 0.0);
      v = std::max(s * s * 0.25 - 0.375, 0.0);
    }
  }
  return out;
}

} // namespace

PatchDenoiseResult denoise_patch(const Patch& x, const Dictionary& dict, const NoiseModel& model,
                                 const DenoiseOptions& opts) {
  if (dict.empty()) throw InvalidInputError("denoise_patch: empty dictionary");
  if (opts.criterion != Criterion::Glr && opts.criterion != Criterion::StabilizedGlr)
    throw InvalidInputError("denoise_patch: criterion must be glr or stab-glr");
  if (!(opts.temperature > 0.0))
    throw InvalidInputError("denoise_patch: temperature must be positive");
  if ((model.kind == NoiseKind::Gaussian) != (opts.family == TransformFamily::Affine))
    throw InvalidInputError(
        "denoise_patch: family must be affine for Gaussian noise and log-affine otherwise");

  std::vector<double> neg_log(dict.size(), 0.0);
  std::vector<Patch> star(dict.size());
  std::vector<char> usable(dict.size(), 0);
  int skipped = 0;
  for (std::size_t j = 0; j < dict.size(); ++j) {
    MatchScore s;
    try {
      s = evaluate(opts.criterion, model, x, dict[j], opts.newton);
    } catch (const DegenerateAtomError&) {
      ++skipped;
      continue;
    }
    neg_log[j] = *s.neg_log_glr;
    star[j] = fitted_atom(opts.criterion, model, dict[j], s);
    usable[j] = 1;
  }
  if (skipped == static_cast<int>(dict.size()))
    throw InvalidInputError("denoise_patch: every atom is degenerate");

  // Weights G^(1/T) in the log domain, shifted by the best (smallest)
  // neg-log-GLR so the top weight is exactly 1 and Z never underflows.
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < dict.size(); ++j)
    if (usable[j]) best = std::min(best, neg_log[j]);

  PatchDenoiseResult res;
  res.skipped_atoms = skipped;
  res.estimate = Patch(x.width, x.height, std::vector<double>(x.values.size(), 0.0));
  double z = 0.0;
  for (std::size_t j = 0; j < dict.size(); ++j) {
    if (!usable[j]) continue;
    const double w = std::exp(-(neg_log[j] - best) / opts.temperature);
    z += w;
    for (int k = 0; k < res.estimate.size(); ++k) res.estimate[k] += w * star[j][k];
  }
  if (!(z >= 1.0))
    throw Error("denoise_patch: weight normalizer underflowed"); // cannot happen after the shift
  for (double& v : res.estimate.values) v /= z;
  res.z = z;
  return res;
}

Image denoise_image(const Image& noisy, const Dictionary& dict, const NoiseModel& model,
                    const DenoiseOptions& opts, DenoiseReport* report) {
  const int w = dict.patch_width;
  const int h = dict.patch_height;
  if (opts.stride < 1 || opts.stride > w || opts.stride > h)
    throw InvalidInputError(
        "denoise_image: stride must be in [1, patch side] so every pixel is covered");
  const auto positions = covering_positions(noisy.width, noisy.height, w, h, opts.stride);

  std::vector<PatchDenoiseResult> results(positions.size());
  parallel_for(positions.size(), opts.threads, [&](std::size_t p) {
    const auto [px, py] = positions[p];
    std::vector<double> v(static_cast<std::size_t>(w) * h);
    for (int dy = 0; dy < h; ++dy)
      for (int dx = 0; dx < w; ++dx)
        v[static_cast<std::size_t>(dy) * w + dx] = noisy.at(px + dx, py + dy);
    results[p] = denoise_patch(Patch(w, h, std::move(v)), dict, model, opts);
  });

  // Uniform averaging of overlapping estimates, accumulated in a fixed order.
  Image sum(noisy.width, noisy.height, 0.0);
  std::vector<int> count(noisy.pixels.size(), 0);
  for (std::size_t p = 0; p < positions.size(); ++p) {
    const auto [px, py] = positions[p];
    for (int dy = 0; dy < h; ++dy)
      for (int dx = 0; dx < w; ++dx) {
        sum.at(px + dx, py + dy) += results[p].estimate[dy * w + dx];
        count[static_cast<std::size_t>(py + dy) * noisy.width + (px + dx)]++;
      }
  }
  for (std::size_t i = 0; i < sum.pixels.size(); ++i) sum.pixels[i] /= count[i];

  if (report) {
    report->z_min = std::numeric_limits<double>::infinity();
    report->z_max = 0.0;
    report->z_mean = 0.0;
    report->skipped_atoms = 0;
    for (const auto& r : results) {
      report->z_min = std::min(report->z_min, r.z);
      report->z_max = std::max(report->z_max, r.z);
      report->z_mean += r.z;
      report->skipped_atoms += r.skipped_atoms;
    }
    report->z_mean /= static_cast<double>(results.size());
  }
  return sum;
}

double psnr(const Image& clean, const Image& test) {
  if (clean.width != test.width || clean.height != test.height)
    throw InvalidInputError("psnr: dimension mismatch");
  double peak = -std::numeric_limits<double>::infinity();
  double mse = 0.0;
  for (std::size_t i = 0; i < clean.pixels.size(); ++i) {
    peak = std::max(peak, clean.pixels[i]);
    const double d = clean.pixels[i] - test.pixels[i];
    mse += d * d;
  }
  mse /= static_cast<double>(clean.pixels.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

} // namespace patchglr
