#pragma once

#include <vector>

#include "patchglr/errors.hpp"
#include "patchglr/patch.hpp"
#include "patchglr/transform.hpp"

namespace patchglr {

struct NewtonConfig {
  int max_iters = 100;
  double tol_alpha = 1e-8;
  double damping = 0.5;       // step-halving factor on objective increase
  bool record_trace = false;  // keep the per-iteration objective values
};

struct FitResult {
  RadiometricTransform transform;
  int iterations = 0;
  double grad_alpha = 0.0; // d(-log lik)/d(alpha) at the returned estimate
  std::vector<double> objective_trace;
};

/// Newton/alternating scheme failed to reach a stationary point.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, RadiometricTransform last, int iterations)
      : Error(what), last_iterate(last), iterations(iterations) {}
  RadiometricTransform last_iterate;
  int iterations = 0;
};

/// Least-squares fit of x ~ alpha*a + beta*1; exact closed form.
FitResult fit_affine_gaussian(const Patch& x, const Patch& a);

/// ML fit of x ~ beta*a^alpha under gamma noise with L looks. Alternates the
/// closed-form beta update with a damped Newton step in alpha, starting from
/// the log-moment initialization. Accepts any strictly positive x (the
/// labeling path fits noise-free patches).
FitResult fit_logaffine_gamma(const Patch& x, const Patch& a, double looks,
                              const NewtonConfig& cfg = {});

/// Same scheme for Poisson noise; beta update Sum(x)/Sum(a^alpha), log-log
/// least-squares initialization with zero counts replaced by 1/2 in the
/// initializer only. x may be real-valued (>= 0 with a positive sum).
FitResult fit_logaffine_poisson(const Patch& x, const Patch& a, const NewtonConfig& cfg = {});

/// Exact fitting objectives (negative log-likelihood dropping terms that do
/// not depend on alpha, beta). Shared by the iteration's damping control.
double gamma_fit_objective(const Patch& x, const Patch& a, double looks, double alpha,
                           double beta);
double poisson_fit_objective(const Patch& x, const Patch& a, double alpha, double beta);

} // namespace patchglr
