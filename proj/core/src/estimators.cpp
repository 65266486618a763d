#include "patchglr/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

namespace patchglr {

namespace {

constexpr int kMaxHalvings = 30;

struct LogDomain {
  std::vector<double> log_a;
  double mean_log_a = 0.0;
  double ss_log_a = 0.0; // centered sum of squares
};

LogDomain log_domain_of(const Patch& a) {
  LogDomain d;
  d.log_a.reserve(a.values.size());
  for (const double v : a.values) {
    if (!(v > 0.0)) throw InvalidInputError("log-affine fit: atom values must be positive");
    d.log_a.push_back(std::log(v));
  }
  d.mean_log_a = mean(d.log_a);
  for (const double la : d.log_a) {
    const double c = la - d.mean_log_a;
    d.ss_log_a += c * c;
  }
  if (d.ss_log_a == 0.0)
    throw DegenerateAtomError("log-affine fit: atom is constant in the log domain");
  return d;
}

// a_k^alpha as exp(alpha * log a_k), reusing the cached logs.
void powers(const LogDomain& d, double alpha, std::vector<double>& out) {
  out.resize(d.log_a.size());
  for (std::size_t k = 0; k < d.log_a.size(); ++k) out[k] = std::exp(alpha * d.log_a[k]);
}

struct AlternatingProblem {
  // Closed-form minimizer of the objective in beta at fixed alpha.
  virtual double beta_update(double alpha) = 0;
  virtual double objective(double alpha, double beta) = 0;
  // g1: d(objective)/d(alpha) at fixed beta. g2: the curvature used for the
  // Newton step (the profile curvature, see the implementations).
  virtual void alpha_derivatives(double alpha, double beta, double& g1, double& g2) = 0;
  virtual ~AlternatingProblem() = default;
};

/// Shared alternating loop: beta update first, then a damped Newton step in
/// alpha. The step is halved (up to kMaxHalvings times) whenever it would
/// increase the objective or produce a non-finite iterate.
FitResult alternate(AlternatingProblem& prob, double alpha0, double beta0,
                    const NewtonConfig& cfg, const char* what) {
  if (cfg.max_iters < 1) throw InvalidInputError("NewtonConfig: max_iters must be >= 1");
  double alpha = alpha0;
  double beta = beta0;

  FitResult res;
  if (cfg.record_trace) res.objective_trace.push_back(prob.objective(alpha, beta));

  auto fail = [&](const char* msg) -> ConvergenceError {
    // Carry the raw last iterate; it may be outside the valid domain.
    return ConvergenceError(std::string(what) + ": " + msg,
                            RadiometricTransform{TransformFamily::LogAffine, alpha, beta},
                            res.iterations);
  };

  bool converged = false;
  for (int it = 0; it < cfg.max_iters; ++it) {
    res.iterations = it + 1;
    beta = prob.beta_update(alpha);
    if (!std::isfinite(beta) || !(beta > 0.0)) throw fail("beta update left the domain");
    const double f_cur = prob.objective(alpha, beta);

    double g1 = 0.0, g2 = 0.0;
    prob.alpha_derivatives(alpha, beta, g1, g2);
    if (!(g2 > 0.0)) throw fail("Newton denominator not positive"); // convex in alpha
    const double newton_step = g1 / g2;

    // Each candidate is judged with its own re-synced beta (the objective
    // the alternation actually descends). Near the optimum a Newton step
    // moves that value by less than the summation roundoff, so the decrease
    // test needs matching slack or it rejects perfectly good steps.
    const double slack = 1e-12 * (1.0 + std::abs(f_cur));
    double step = newton_step;
    double alpha_next = alpha;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      const double cand = alpha - step;
      if (std::isfinite(cand)) {
        const double beta_cand = prob.beta_update(cand);
        if (std::isfinite(beta_cand) && beta_cand > 0.0) {
          const double f_cand = prob.objective(cand, beta_cand);
          if (std::isfinite(f_cand) && f_cand <= f_cur + slack) {
            alpha_next = cand;
            beta = beta_cand;
            accepted = true;
            break;
          }
        }
      }
      step *= cfg.damping;
    }
    if (!accepted) throw fail("damping retries exhausted");

    if (cfg.record_trace) res.objective_trace.push_back(prob.objective(alpha_next, beta));
    const double delta = std::abs(alpha_next - alpha);
    alpha = alpha_next;
    if (delta < cfg.tol_alpha) {
      converged = true;
      break;
    }
  }

  // Re-sync beta so the returned point is exactly beta-stationary.
  beta = prob.beta_update(alpha);
  double g1 = 0.0, g2 = 0.0;
  prob.alpha_derivatives(alpha, beta, g1, g2);
  res.grad_alpha = g1;
  res.transform = RadiometricTransform::log_affine(alpha, beta);

  if (!converged || std::abs(g1) >= 10.0 * cfg.tol_alpha)
    throw ConvergenceError(std::string(what) + ": no stationary point within budget",
                           res.transform, res.iterations);
  return res;
}

struct GammaProblem final : AlternatingProblem {
  const Patch& x;
  double looks;
  const LogDomain& dom;
  std::vector<double> pow_buf;

  GammaProblem(const Patch& x, double looks, const LogDomain& dom)
      : x(x), looks(looks), dom(dom) {}

  double beta_update(double alpha) override {
    // argmin_beta = (1/N) sum x_k / a_k^alpha
    powers(dom, -alpha, pow_buf);
    double s = 0.0;
    for (int k = 0; k < x.size(); ++k) s += x[k] * pow_buf[k];
    return s / static_cast<double>(x.size());
  }

  double objective(double alpha, double beta) override {
    return gamma_fit_objective_cached(alpha, beta);
  }

  void alpha_derivatives(double alpha, double beta, double& g1, double& g2) override {
    // The beta update runs first, so sum(r) = N here and the numerator is
    // unchanged by recentering the logs. The denominator uses the logs
    // recentered by the r-weighted mean: same Newton step written in
    // coordinates where the two unknowns decouple, which is what makes
    // "only a few iterations" hold on 8-bit-scaled atoms.
    powers(dom, alpha, pow_buf);
    double sum_r = 0.0, sum_r_la = 0.0;
    for (int k = 0; k < x.size(); ++k) {
      pow_buf[k] = x[k] / (beta * pow_buf[k]); // r_k
      sum_r += pow_buf[k];
      sum_r_la += pow_buf[k] * dom.log_a[k];
    }
    const double wbar = sum_r_la / sum_r;
    g1 = 0.0;
    g2 = 0.0;
    for (int k = 0; k < x.size(); ++k) {
      const double la = dom.log_a[k];
      const double c = la - wbar;
      g1 += (1.0 - pow_buf[k]) * la;
      g2 += pow_buf[k] * c * c;
    }
    g1 *= looks;
    g2 *= looks;
  }

  double gamma_fit_objective_cached(double alpha, double beta) {
    // L * sum( log beta + alpha*log a_k + x_k / (beta * a_k^alpha) )
    powers(dom, -alpha, pow_buf);
    double s = 0.0;
    for (int k = 0; k < x.size(); ++k)
      s += std::log(beta) + alpha * dom.log_a[k] + x[k] * pow_buf[k] / beta;
    return looks * s;
  }
};

struct PoissonProblem final : AlternatingProblem {
  const Patch& x;
  const LogDomain& dom;
  double sum_x = 0.0;
  double sum_x_log_a = 0.0;
  std::vector<double> pow_buf;

  PoissonProblem(const Patch& x, const LogDomain& dom) : x(x), dom(dom) {
    for (int k = 0; k < x.size(); ++k) {
      sum_x += x[k];
      sum_x_log_a += x[k] * dom.log_a[k];
    }
  }

  double beta_update(double alpha) override {
    powers(dom, alpha, pow_buf);
    double s = 0.0;
    for (const double p : pow_buf) s += p;
    return sum_x / s;
  }

  double objective(double alpha, double beta) override {
    powers(dom, alpha, pow_buf);
    double s = 0.0;
    for (const double p : pow_buf) s += p;
    return beta * s - sum_x * std::log(beta) - alpha * sum_x_log_a;
  }

  void alpha_derivatives(double alpha, double beta, double& g1, double& g2) override {
    // Same recentering as the gamma step; sum(beta*a^alpha) = sum(x) holds
    // because the beta update ran first, so the numerator is untouched.
    powers(dom, alpha, pow_buf);
    double sum_t = 0.0, sum_t_la = 0.0;
    for (int k = 0; k < x.size(); ++k) {
      pow_buf[k] *= beta; // t_k
      sum_t += pow_buf[k];
      sum_t_la += pow_buf[k] * dom.log_a[k];
    }
    const double wbar = sum_t_la / sum_t;
    g1 = 0.0;
    g2 = 0.0;
    for (int k = 0; k < x.size(); ++k) {
      const double la = dom.log_a[k];
      const double c = la - wbar;
      g1 += (pow_buf[k] - x[k]) * la;
      g2 += pow_buf[k] * c * c;
    }
  }
};

} // namespace

FitResult fit_affine_gaussian(const Patch& x, const Patch& a) {
  if (x.size() != a.size()) throw InvalidInputError("fit_affine_gaussian: dimension mismatch");
  const int n = x.size();
  if (n < 2) throw InvalidInputError("fit_affine_gaussian: need at least 2 pixels");
  const double xbar = mean(x);
  const double abar = mean(a);
  double saa = 0.0, sxa = 0.0;
  for (int k = 0; k < n; ++k) {
    const double ca = a[k] - abar;
    saa += ca * ca;
    sxa += (x[k] - xbar) * ca;
  }
  if (saa == 0.0) throw DegenerateAtomError("fit_affine_gaussian: constant atom");
  FitResult res;
  const double alpha = sxa / saa;
  res.transform = RadiometricTransform::affine(alpha, xbar - alpha * abar);
  res.iterations = 0;
  res.grad_alpha = 0.0;
  return res;
}

double gamma_fit_objective(const Patch& x, const Patch& a, double looks, double alpha,
                           double beta) {
  double s = 0.0;
  for (int k = 0; k < x.size(); ++k) {
    const double t = beta * std::pow(a[k], alpha);
    s += std::log(t) + x[k] / t;
  }
  return looks * s;
}

double poisson_fit_objective(const Patch& x, const Patch& a, double alpha, double beta) {
  double s = 0.0;
  for (int k = 0; k < x.size(); ++k) {
    const double t = beta * std::pow(a[k], alpha);
    s += t - (x[k] > 0.0 ? x[k] * std::log(t) : 0.0);
  }
  return s;
}

FitResult fit_logaffine_gamma(const Patch& x, const Patch& a, double looks,
                              const NewtonConfig& cfg) {
  if (x.size() != a.size()) throw InvalidInputError("fit_logaffine_gamma: dimension mismatch");
  if (!(looks > 0.0)) throw InvalidInputError("fit_logaffine_gamma: looks must be > 0");
  for (const double v : x.values)
    if (!(v > 0.0)) throw InvalidInputError("fit_logaffine_gamma: x must be strictly positive");
  const LogDomain dom = log_domain_of(a);
  const int n = x.size();

  // Log-moment initialization.
  std::vector<double> log_x(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) log_x[static_cast<std::size_t>(k)] = std::log(x[k]);
  const double mean_log_x = mean(log_x);
  double ss_log_x = 0.0;
  for (const double lx : log_x) {
    const double c = lx - mean_log_x;
    ss_log_x += c * c;
  }
  const double trig = boost::math::trigamma(looks);
  const double alpha0 = std::sqrt(std::max(ss_log_x - trig, 0.0) / dom.ss_log_a);
  const double beta0 = std::exp(mean_log_x - boost::math::digamma(looks) + std::log(looks) -
                                alpha0 * dom.mean_log_a);

  GammaProblem prob(x, looks, dom);
  return alternate(prob, alpha0, beta0, cfg, "fit_logaffine_gamma");
}

FitResult fit_logaffine_poisson(const Patch& x, const Patch& a, const NewtonConfig& cfg) {
  if (x.size() != a.size()) throw InvalidInputError("fit_logaffine_poisson: dimension mismatch");
  double sum_x = 0.0;
  for (const double v : x.values) {
    if (!(v >= 0.0)) throw InvalidInputError("fit_logaffine_poisson: x must be nonnegative");
    sum_x += v;
  }
  if (!(sum_x > 0.0)) throw InvalidInputError("fit_logaffine_poisson: x sums to zero");
  const LogDomain dom = log_domain_of(a);
  const int n = x.size();

  // Least squares between log x and log a; zero counts become 1/2 here only.
  double mean_log_x = 0.0;
  std::vector<double> log_x(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    log_x[static_cast<std::size_t>(k)] = std::log(x[k] > 0.0 ? x[k] : 0.5);
    mean_log_x += log_x[static_cast<std::size_t>(k)];
  }
  mean_log_x /= static_cast<double>(n);
  double cross = 0.0;
  for (int k = 0; k < n; ++k)
    cross += (dom.log_a[static_cast<std::size_t>(k)] - dom.mean_log_a) *
             (log_x[static_cast<std::size_t>(k)] - mean_log_x);
  const double alpha0 = cross / dom.ss_log_a;
  const double beta0 = std::exp(mean_log_x - alpha0 * dom.mean_log_a);

  PoissonProblem prob(x, dom);
  return alternate(prob, alpha0, beta0, cfg, "fit_logaffine_poisson");
}

} // namespace patchglr
