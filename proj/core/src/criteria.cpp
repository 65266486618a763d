#include "patchglr/criteria.hpp"

#include <algorithm>
#include <cmath>

namespace patchglr {

namespace {

// Roundoff guard: a GLR is a likelihood ratio against the unconstrained
// maximum, so -log G is nonnegative up to floating-point error.
double clamp_neg_log(double v, const char* what) {
  if (v < 0.0) {
    if (v < -1e-6) throw Error(std::string(what) + ": negative -log GLR");
    return 0.0;
  }
  return v;
}

MatchScore glr_score(double neg_log, RadiometricTransform fitted) {
  MatchScore s;
  s.neg_log_glr = neg_log;
  s.value = -neg_log;
  s.fitted = fitted;
  return s;
}

} // namespace

MatchScore correlation(const Patch& x, const Patch& a) {
  if (x.size() != a.size()) throw InvalidInputError("correlation: dimension mismatch");
  const int n = x.size();
  const double xbar = mean(x);
  const double abar = mean(a);
  double sxx = 0.0, saa = 0.0, sxa = 0.0;
  for (int k = 0; k < n; ++k) {
    const double cx = x[k] - xbar;
    const double ca = a[k] - abar;
    sxx += cx * cx;
    saa += ca * ca;
    sxa += cx * ca;
  }
  MatchScore s;
  if (sxx == 0.0 || saa == 0.0) {
    s.value = 0.0; // 0/0 in the definition; flagged instead of NaN
    s.degenerate = true;
    return s;
  }
  s.value = std::min(std::abs(sxa) / std::sqrt(sxx * saa), 1.0);
  return s;
}

MatchScore glr_gaussian(const Patch& x, const Patch& a, double sigma) {
  if (!(sigma > 0.0)) throw InvalidInputError("glr_gaussian: sigma must be > 0");
  if (x.size() != a.size()) throw InvalidInputError("glr_gaussian: dimension mismatch");
  const FitResult fit = fit_affine_gaussian(x, a); // rejects constant atoms
  const int n = x.size();
  const double xbar = mean(x);
  const double abar = mean(a);
  double sxx = 0.0, saa = 0.0, sxa = 0.0;
  for (int k = 0; k < n; ++k) {
    const double cx = x[k] - xbar;
    const double ca = a[k] - abar;
    sxx += cx * cx;
    saa += ca * ca;
    sxa += cx * ca;
  }
  if (sxx == 0.0) {
    // Zero signal energy: any template explains the observation.
    return glr_score(0.0, fit.transform);
  }
  const double c2 = (sxa * sxa) / (sxx * saa);
  const double neg = clamp_neg_log((1.0 - c2) * sxx / (2.0 * sigma * sigma), "glr_gaussian");
  return glr_score(neg, fit.transform);
}

MatchScore glr_gamma(const Patch& x, const Patch& a, double looks, const NewtonConfig& cfg) {
  const FitResult fit = fit_logaffine_gamma(x, a, looks, cfg);
  const double alpha = fit.transform.alpha;
  const double beta = fit.transform.beta;
  const int n = x.size();

  // The Prop-form below already used sum x/(beta*a^alpha) = N; make sure we
  // really are at the beta-stationary point before trusting it.
  double sum_r = 0.0, neg = 0.0;
  for (int k = 0; k < n; ++k) {
    const double log_t = std::log(beta) + alpha * std::log(a[k]);
    sum_r += x[k] * std::exp(-log_t);
    neg += log_t - std::log(x[k]);
  }
  if (std::abs(sum_r - n) > 1e-6 * n)
    throw ConvergenceError("glr_gamma: beta stationarity violated", fit.transform,
                           fit.iterations);
  return glr_score(clamp_neg_log(looks * neg, "glr_gamma"), fit.transform);
}

MatchScore glr_poisson(const Patch& x, const Patch& a, const NewtonConfig& cfg) {
  double sum_x = 0.0;
  for (const double v : x.values) {
    if (!(v >= 0.0) || std::floor(v) != v)
      throw InvalidInputError("glr_poisson: x must be nonnegative integers");
    sum_x += v;
  }
  const FitResult fit = fit_logaffine_poisson(x, a, cfg);
  const double alpha = fit.transform.alpha;
  const double beta = fit.transform.beta;
  const int n = x.size();

  double sum_t = 0.0, neg = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = beta * std::pow(a[k], alpha);
    sum_t += t;
    if (x[k] > 0.0) neg += x[k] * std::log(x[k] / t); // 0*log(0) = 0
  }
  if (std::abs(sum_t - sum_x) > 1e-6 * sum_x)
    throw ConvergenceError("glr_poisson: beta stationarity violated", fit.transform,
                           fit.iterations);
  return glr_score(clamp_neg_log(neg, "glr_poisson"), fit.transform);
}

MatchScore stabilized_correlation(const NoiseModel& model, const Patch& x, const Patch& a) {
  return correlation(stabilize(model, x).patch, stabilize(model, a).patch);
}

MatchScore stabilized_glr(const NoiseModel& model, const Patch& x, const Patch& a) {
  const StabilizedPatch sx = stabilize(model, x);
  const StabilizedPatch sa = stabilize(model, a);
  return glr_gaussian(sx.patch, sa.patch, sx.sigma);
}

const char* name(Criterion c) {
  switch (c) {
    case Criterion::Correlation: return "corr";
    case Criterion::Glr: return "glr";
    case Criterion::StabilizedCorrelation: return "stab-corr";
    case Criterion::StabilizedGlr: return "stab-glr";
  }
  return "?";
}

Criterion criterion_from_name(const std::string& s) {
  if (s == "corr") return Criterion::Correlation;
  if (s == "glr") return Criterion::Glr;
  if (s == "stab-corr") return Criterion::StabilizedCorrelation;
  if (s == "stab-glr") return Criterion::StabilizedGlr;
  throw InvalidInputError("unknown criterion: " + s);
}

MatchScore evaluate(Criterion c, const NoiseModel& model, const Patch& x, const Patch& a,
                    const NewtonConfig& cfg) {
  switch (c) {
    case Criterion::Correlation:
      return correlation(x, a);
    case Criterion::Glr:
      switch (model.kind) {
        case NoiseKind::Gaussian: return glr_gaussian(x, a, model.sigma);
        case NoiseKind::Gamma: return glr_gamma(x, a, model.looks, cfg);
        case NoiseKind::Poisson: return glr_poisson(x, a, cfg);
      }
      break;
    case Criterion::StabilizedCorrelation:
      return stabilized_correlation(model, x, a);
    case Criterion::StabilizedGlr:
      return stabilized_glr(model, x, a);
  }
  throw InvalidInputError("evaluate: unknown criterion");
}

std::size_t best_match(Criterion c, const NoiseModel& model, const Patch& x,
                       const Dictionary& dict, const NewtonConfig& cfg) {
  if (dict.empty()) throw InvalidInputError("best_match: empty dictionary");
  std::size_t best = 0;
  double best_value = evaluate(c, model, x, dict[0], cfg).value;
  for (std::size_t j = 1; j < dict.size(); ++j) {
    const double v = evaluate(c, model, x, dict[j], cfg).value;
    if (v > best_value) { // strict: ties keep the lowest index
      best_value = v;
      best = j;
    }
  }
  return best;
}

} // namespace patchglr
