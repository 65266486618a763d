#pragma once

#include <optional>
#include <string>

#include "patchglr/dictionary.hpp"
#include "patchglr/estimators.hpp"
#include "patchglr/noise.hpp"

namespace patchglr {

/// Criterion output; larger value = better match. GLR criteria expose
/// value = -neg_log_glr so a uniform "declare mismatch when value < tau"
/// threshold works for every criterion.
struct MatchScore {
  double value = 0.0;
  std::optional<double> neg_log_glr;
  std::optional<RadiometricTransform> fitted;
  bool degenerate = false; // correlation of a constant vector (0/0 case)
};

/// Normalized correlation |sum (x-xbar)(a-abar)| / sqrt(Sxx*Saa), in [0,1].
/// A constant x or a yields value 0 with the degenerate flag set.
MatchScore correlation(const Patch& x, const Patch& a);

/// Gaussian GLR closed form: -log G = (1 - C^2) * ||x - xbar*1||^2 / (2 sigma^2),
/// with the least-squares affine fit attached.
MatchScore glr_gaussian(const Patch& x, const Patch& a, double sigma);

/// Gamma GLR: -log G = L * sum log(beta*a^alpha / x) at the fitted optimum.
/// Only valid at beta stationarity (sum x/(beta*a^alpha) = N), which is
/// checked to 1e-6 relative.
MatchScore glr_gamma(const Patch& x, const Patch& a, double looks,
                     const NewtonConfig& cfg = {});

/// Poisson GLR: -log G = sum x*log(x / (beta*a^alpha)), 0*log(0) = 0;
/// requires integer-valued x and beta stationarity sum(beta*a^alpha) = sum(x).
MatchScore glr_poisson(const Patch& x, const Patch& a, const NewtonConfig& cfg = {});

/// Correlation / Gaussian GLR evaluated on variance-stabilized values.
MatchScore stabilized_correlation(const NoiseModel& model, const Patch& x, const Patch& a);
MatchScore stabilized_glr(const NoiseModel& model, const Patch& x, const Patch& a);

enum class Criterion { Correlation, Glr, StabilizedCorrelation, StabilizedGlr };

const char* name(Criterion c);
Criterion criterion_from_name(const std::string& s); // "corr", "glr", "stab-corr", "stab-glr"

/// Dispatch one criterion against one (x, atom) pair. The GLR route picks
/// the noise-adapted form from the model kind.
MatchScore evaluate(Criterion c, const NoiseModel& model, const Patch& x, const Patch& a,
                    const NewtonConfig& cfg = {});

/// Index of the best-scoring atom; ties broken by lowest index.
std::size_t best_match(Criterion c, const NoiseModel& model, const Patch& x,
                       const Dictionary& dict, const NewtonConfig& cfg = {});

} // namespace patchglr
