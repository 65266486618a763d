#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "patchglr/criteria.hpp"
#include "patchglr/dictionary.hpp"
#include "patchglr/noise.hpp"

namespace patchglr {

enum class Label { H0, H1 };

struct LabeledPair {
  int trial = 0;
  int patch_index = 0; // index of the atom the noisy patch was generated from
  int atom_index = 0;  // index of the (transformed) template it was scored against
  double score = 0.0;
  Label label = Label::H1;
  double kl = 0.0; // minimized KL divergence used for the labeling
};

struct RocPoint {
  double tau = 0.0;
  double p_fa = 0.0;
  double p_d = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points; // sorted by p_fa (and p_d) non-decreasing
  double auc = 0.0;             // trapezoidal integral of the points
};

/// KL-relaxed hypothesis label: H0 iff min over (alpha, beta) of
/// KL(theta || T(a)) is at most nu. The minimizer is obtained by fitting the
/// transform of the noise-free theta onto a with the family's ML estimator,
/// which minimizes these KL divergences exactly.
std::pair<Label, double> label_pair(const NoiseModel& model, const Patch& theta, const Patch& a,
                                    TransformFamily family, double nu,
                                    const NewtonConfig& cfg = {});

struct ExperimentConfig {
  Criterion criterion = Criterion::Glr;
  TransformFamily family = TransformFamily::Affine;
  int trials = 20;
  double nu = 0.02;
  std::uint64_t seed = 1;
  Interval alpha_range; // empty => family default
  Interval beta_range;  // empty => family default
  NewtonConfig newton;
  int threads = 0; // 0 = auto

  static ExperimentConfig defaults(Criterion c, TransformFamily f);
};

/// One detection experiment: per trial, every atom is randomly transformed
/// into a template and every (untransformed) atom generates one noisy patch;
/// all (patch, template) pairs are scored and labeled. Pair order is
/// trial-major, patch-major, atom-minor, independent of scheduling.
std::vector<LabeledPair> run_detection_experiment(const Dictionary& dict, const NoiseModel& model,
                                                  const ExperimentConfig& cfg);

/// Empirical ROC: sweeps tau over all distinct scores; P_FA (P_D) is the
/// fraction of H0 (H1) pairs with score < tau. Endpoints (0,0) and (1,1)
/// are appended; AUC by trapezoid.
RocCurve roc(const std::vector<LabeledPair>& pairs);

/// CSV with header `tau,p_fa,p_d` and a trailing `# auc=<value>` line.
void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve);

/// Optional dump: `trial,patch,atom,score,kl,label` rows.
void write_pairs_csv(const std::filesystem::path& path, const std::vector<LabeledPair>& pairs);

} // namespace patchglr
