#pragma once

#include <cstdint>
#include <string>

#include "patchglr/dictionary.hpp"
#include "patchglr/patch.hpp"

namespace patchglr {

enum class NoiseKind { Gaussian, Gamma, Poisson };

const char* name(NoiseKind kind);

/// Tagged noise family. Unused fields are ignored:
///   Gaussian(sigma)  x_k = theta_k + sigma*n_k
///   Gamma(looks)     x_k ~ Gamma(shape=L, scale=theta_k/L), E[x_k]=theta_k
///   Poisson          x_k ~ Poisson(theta_k)
struct NoiseModel {
  NoiseKind kind = NoiseKind::Gaussian;
  double sigma = 1.0;
  double looks = 1.0;

  /// sigma = 0 is accepted as the degenerate noise used by sampling tests;
  /// operations that divide by sigma reject it themselves.
  static NoiseModel gaussian(double sigma);
  static NoiseModel gamma(double looks);
  static NoiseModel poisson();
};

/// Sum over pixels of log p(x_k | theta_k) for the family's density/mass.
/// Poisson log-factorials go through lgamma; the 0*log(0) = 0 convention holds.
double log_likelihood(const NoiseModel& model, const Patch& x, const Patch& theta);

/// Draw one noisy realization of theta. Deterministic given the seed.
Patch sample(const NoiseModel& model, const Patch& theta, std::uint64_t rng_seed);

/// Per-pixel mean of the scalar KL divergences KL(p(.|theta1_k) || p(.|theta2_k)).
/// Closed forms:
///   Gaussian  (t1-t2)^2 / (2 sigma^2)
///   Gamma     L * (t1/t2 - 1 - log(t1/t2))
///   Poisson   t1*log(t1/t2) + t2 - t1
double kl_divergence(const NoiseModel& model, const Patch& theta1, const Patch& theta2);

struct StabilizedPatch {
  Patch patch;
  double sigma = 1.0; // std-dev of the (approximately) Gaussian stabilized noise
};

/// Variance-stabilizing transform: identity for Gaussian (sigma carried
/// through), element-wise log for gamma (stabilized sigma = sqrt(trigamma(L))),
/// Anscombe 2*sqrt(x + 3/8) for Poisson (stabilized sigma = 1).
StabilizedPatch stabilize(const NoiseModel& model, const Patch& x);

struct SnrCalibration {
  NoiseModel model;
  double theta_scale = 1.0; // Poisson only: global intensity scale applied to theta
};

/// Choose model parameters so that
///   10*log10( Var_pixels(all atom values) / mean per-pixel noise variance )
/// equals target_db. For Poisson the returned theta_scale rescales the
/// dictionary; sigma/looks are solved in closed form for the other families.
SnrCalibration calibrate_snr(NoiseKind kind, const Dictionary& dict, double target_db);

} // namespace patchglr
