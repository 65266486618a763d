#include "patchglr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "patchglr/parallel.hpp"
#include "patchglr/rng.hpp"

namespace patchglr {

namespace {

void require_family_model_pairing(const NoiseModel& model, TransformFamily family) {
  const bool gaussian = model.kind == NoiseKind::Gaussian;
  if (gaussian != (family == TransformFamily::Affine))
    throw InvalidInputError(
        "transform family must be affine for Gaussian noise and log-affine for gamma/Poisson");
}

} // namespace

std::pair<Label, double> label_pair(const NoiseModel& model, const Patch& theta, const Patch& a,
                                    TransformFamily family, double nu, const NewtonConfig& cfg) {
  require_family_model_pairing(model, family);
  if (!(nu >= 0.0)) throw InvalidInputError("label_pair: nu must be nonnegative");

  // Fitting theta (noise-free) onto a with the family's ML estimator
  // minimizes the per-family KL divergence exactly: least squares is the
  // Gaussian KL minimizer, and the gamma/Poisson objectives equal the KL up
  // to theta-only terms.
  RadiometricTransform t;
  switch (model.kind) {
    case NoiseKind::Gaussian: t = fit_affine_gaussian(theta, a).transform; break;
    case NoiseKind::Gamma: t = fit_logaffine_gamma(theta, a, model.looks, cfg).transform; break;
    case NoiseKind::Poisson: t = fit_logaffine_poisson(theta, a, cfg).transform; break;
  }
  const double kl = kl_divergence(model, theta, apply(t, a));
  return {kl <= nu ? Label::H0 : Label::H1, kl};
}

ExperimentConfig ExperimentConfig::defaults(Criterion c, TransformFamily f) {
  ExperimentConfig cfg;
  cfg.criterion = c;
  cfg.family = f;
  cfg.alpha_range = default_alpha_range(f);
  cfg.beta_range = default_beta_range(f);
  return cfg;
}

std::vector<LabeledPair> run_detection_experiment(const Dictionary& dict, const NoiseModel& model,
                                                  const ExperimentConfig& cfg) {
  if (dict.empty()) throw InvalidInputError("run_detection_experiment: empty dictionary");
  require_family_model_pairing(model, cfg.family);
  const Interval alpha_range =
      (cfg.alpha_range.lo == 0.0 && cfg.alpha_range.hi == 0.0) ? default_alpha_range(cfg.family)
                                                               : cfg.alpha_range;
  const Interval beta_range =
      (cfg.beta_range.lo == 0.0 && cfg.beta_range.hi == 0.0) ? default_beta_range(cfg.family)
                                                             : cfg.beta_range;

  const std::size_t n_atoms = dict.size();
  const std::size_t pairs_per_trial = n_atoms * n_atoms;
  std::vector<LabeledPair> out(static_cast<std::size_t>(cfg.trials) * pairs_per_trial);

  for (int trial = 0; trial < cfg.trials; ++trial) {
    // Template set: every atom randomly transformed; noisy patches: one
    // realization of every untransformed atom.
    std::vector<Patch> templates(n_atoms);
    std::vector<Patch> noisy(n_atoms);
    for (std::size_t j = 0; j < n_atoms; ++j) {
      const auto t = random_transform(
          cfg.family, substream(cfg.seed, stream::transform, static_cast<std::uint64_t>(trial), j),
          alpha_range, beta_range);
      templates[j] = apply(t, dict[j]);
    }
    for (std::size_t i = 0; i < n_atoms; ++i)
      noisy[i] = sample(model, dict[i],
                        substream(cfg.seed, stream::noise, static_cast<std::uint64_t>(trial), i));

    LabeledPair* trial_out = out.data() + static_cast<std::size_t>(trial) * pairs_per_trial;
    parallel_for(pairs_per_trial, cfg.threads, [&](std::size_t p) {
      const std::size_t i = p / n_atoms; // patch index
      const std::size_t j = p % n_atoms; // template/atom index
      LabeledPair& lp = trial_out[p];
      lp.trial = trial;
      lp.patch_index = static_cast<int>(i);
      lp.atom_index = static_cast<int>(j);
      lp.score = evaluate(cfg.criterion, model, noisy[i], templates[j], cfg.newton).value;
      const auto [label, kl] = label_pair(model, dict[i], templates[j], cfg.family, cfg.nu,
                                          cfg.newton);
      lp.label = label;
      lp.kl = kl;
    });
  }
  return out;
}

RocCurve roc(const std::vector<LabeledPair>& pairs) {
  std::vector<double> h0, h1;
  for (const LabeledPair& p : pairs)
    (p.label == Label::H0 ? h0 : h1).push_back(p.score);
  if (h0.empty() || h1.empty())
    throw InvalidInputError("roc: need at least one H0 and one H1 pair");
  std::sort(h0.begin(), h0.end());
  std::sort(h1.begin(), h1.end());

  std::vector<double> taus;
  taus.reserve(h0.size() + h1.size());
  taus.insert(taus.end(), h0.begin(), h0.end());
  taus.insert(taus.end(), h1.begin(), h1.end());
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

  RocCurve curve;
  curve.points.reserve(taus.size() + 2);
  const double inf = std::numeric_limits<double>::infinity();
  curve.points.push_back({-inf, 0.0, 0.0});
  std::size_t i0 = 0, i1 = 0;
  for (const double tau : taus) {
    while (i0 < h0.size() && h0[i0] < tau) ++i0;
    while (i1 < h1.size() && h1[i1] < tau) ++i1;
    curve.points.push_back({tau, static_cast<double>(i0) / static_cast<double>(h0.size()),
                            static_cast<double>(i1) / static_cast<double>(h1.size())});
  }
  curve.points.push_back({inf, 1.0, 1.0});

  double auc = 0.0;
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const RocPoint& a = curve.points[k - 1];
    const RocPoint& b = curve.points[k];
    auc += (b.p_fa - a.p_fa) * (a.p_d + b.p_d) * 0.5;
  }
  curve.auc = auc;
  return curve;
}

void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve) {
  std::ofstream os(path);
  if (!os) throw IoError("write_roc_csv: cannot open " + path.string());
  os << "tau,p_fa,p_d\n";
  char line[128];
  for (const RocPoint& p : curve.points) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n", p.tau, p.p_fa, p.p_d);
    os << line;
  }
  std::snprintf(line, sizeof(line), "# auc=%.17g\n", curve.auc);
  os << line;
  if (!os) throw IoError("write_roc_csv: write failed for " + path.string());
}

void write_pairs_csv(const std::filesystem::path& path, const std::vector<LabeledPair>& pairs) {
  std::ofstream os(path);
  if (!os) throw IoError("write_pairs_csv: cannot open " + path.string());
  os << "trial,patch,atom,score,kl,label\n";
  char line[160];
  for (const LabeledPair& p : pairs) {
    std::snprintf(line, sizeof(line), "%d,%d,%d,%.17g,%.17g,%s\n", p.trial, p.patch_index,
                  p.atom_index, p.score, p.kl, p.label == Label::H0 ? "H0" : "H1");
    os << line;
  }
  if (!os) throw IoError("write_pairs_csv: write failed for " + path.string());
}

} // namespace patchglr
