#pragma once

#include <cmath>
#include <string>

#include "patchglr/errors.hpp"
#include "patchglr/patch.hpp"

namespace patchglr {

/// The two contrast-change families the criteria are invariant to:
/// Affine    T(a) = alpha*a + beta*1        (Gaussian experiments)
/// LogAffine T(a) = beta * a^alpha          (gamma / Poisson experiments, beta > 0)
enum class TransformFamily { Affine, LogAffine };

inline const char* name(TransformFamily f) {
  return f == TransformFamily::Affine ? "affine" : "log-affine";
}

struct RadiometricTransform {
  TransformFamily family = TransformFamily::Affine;
  double alpha = 1.0;
  double beta = 0.0;

  static RadiometricTransform affine(double alpha, double beta) {
    return {TransformFamily::Affine, alpha, beta};
  }
  static RadiometricTransform log_affine(double alpha, double beta) {
    if (!(beta > 0.0))
      throw InvalidInputError("RadiometricTransform: log-affine beta must be positive");
    return {TransformFamily::LogAffine, alpha, beta};
  }
};

/// Apply T element-wise; dimensions are preserved.
inline Patch apply(const RadiometricTransform& t, const Patch& a) {
  Patch out = a;
  if (t.family == TransformFamily::Affine) {
    for (double& v : out.values) v = t.alpha * v + t.beta;
  } else {
    if (!(t.beta > 0.0))
      throw InvalidInputError("apply: log-affine beta must be positive");
    for (double& v : out.values) {
      if (!(v > 0.0))
        throw InvalidInputError("apply: log-affine transform needs positive atom values");
      v = t.beta * std::pow(v, t.alpha);
    }
  }
  return out;
}

} // namespace patchglr
