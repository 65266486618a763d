#include "patchglr/noise.hpp"

#include <cmath>
#include <random>

#include <boost/math/special_functions/trigamma.hpp>

#include "patchglr/rng.hpp"

namespace patchglr {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

void require_same_shape(const Patch& x, const Patch& theta) {
  if (x.size() != theta.size())
    throw InvalidInputError("patch dimension mismatch");
}

void require_positive(const Patch& p, const char* what) {
  for (const double v : p.values)
    if (!(v > 0.0)) throw InvalidInputError(std::string(what) + " must be strictly positive");
}

void require_nonnegative_integers(const Patch& p, const char* what) {
  for (const double v : p.values)
    if (!(v >= 0.0) || std::floor(v) != v)
      throw InvalidInputError(std::string(what) + " must be nonnegative integers");
}

} // namespace

const char* name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::Gamma: return "gamma";
    case NoiseKind::Poisson: return "poisson";
  }
  return "?";
}

NoiseModel NoiseModel::gaussian(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw InvalidInputError("NoiseModel: gaussian sigma must be >= 0");
  return {NoiseKind::Gaussian, sigma, 1.0};
}

NoiseModel NoiseModel::gamma(double looks) {
  if (!(looks > 0.0) || !std::isfinite(looks))
    throw InvalidInputError("NoiseModel: gamma looks must be > 0");
  return {NoiseKind::Gamma, 1.0, looks};
}

NoiseModel NoiseModel::poisson() { return {NoiseKind::Poisson, 1.0, 1.0}; }

double log_likelihood(const NoiseModel& model, const Patch& x, const Patch& theta) {
  require_same_shape(x, theta);
  const int n = x.size();
  double ll = 0.0;
  switch (model.kind) {
    case NoiseKind::Gaussian: {
      if (!(model.sigma > 0.0))
        throw InvalidInputError("log_likelihood: gaussian sigma must be > 0");
      const double inv2s2 = 1.0 / (2.0 * model.sigma * model.sigma);
      for (int k = 0; k < n; ++k) {
        const double r = x[k] - theta[k];
        ll += -0.5 * kLog2Pi - std::log(model.sigma) - r * r * inv2s2;
      }
      return ll;
    }
    case NoiseKind::Gamma: {
      require_positive(theta, "gamma theta");
      require_positive(x, "gamma x");
      const double L = model.looks;
      const double norm = L * std::log(L) - std::lgamma(L);
      for (int k = 0; k < n; ++k)
        ll += norm + (L - 1.0) * std::log(x[k]) - L * std::log(theta[k]) - L * x[k] / theta[k];
      return ll;
    }
    case NoiseKind::Poisson: {
      require_positive(theta, "poisson theta");
      require_nonnegative_integers(x, "poisson x");
      for (int k = 0; k < n; ++k) {
        const double term = x[k] > 0.0 ? x[k] * std::log(theta[k]) : 0.0;
        ll += term - theta[k] - std::lgamma(x[k] + 1.0);
      }
      return ll;
    }
  }
  throw InvalidInputError("log_likelihood: unknown noise kind");
}

Patch sample(const NoiseModel& model, const Patch& theta, std::uint64_t rng_seed) {
  Patch out = theta;
  auto rng = make_rng(rng_seed);
  switch (model.kind) {
    case NoiseKind::Gaussian: {
      if (model.sigma == 0.0) return out; // degenerate noise: exact copy
      std::normal_distribution<double> dist(0.0, model.sigma);
      for (double& v : out.values) v += dist(rng);
      return out;
    }
    case NoiseKind::Gamma: {
      require_positive(theta, "gamma theta");
      for (double& v : out.values) {
        std::gamma_distribution<double> dist(model.looks, v / model.looks);
        v = dist(rng);
      }
      return out;
    }
    case NoiseKind::Poisson: {
      require_positive(theta, "poisson theta");
      for (double& v : out.values) {
        std::poisson_distribution<long> dist(v);
        v = static_cast<double>(dist(rng));
      }
      return out;
    }
  }
  throw InvalidInputError("sample: unknown noise kind");
}

double kl_divergence(const NoiseModel& model, const Patch& theta1, const Patch& theta2) {
  require_same_shape(theta1, theta2);
  const int n = theta1.size();
  double acc = 0.0;
  switch (model.kind) {
    case NoiseKind::Gaussian: {
      if (!(model.sigma > 0.0))
        throw InvalidInputError("kl_divergence: gaussian sigma must be > 0");
      const double inv2s2 = 1.0 / (2.0 * model.sigma * model.sigma);
      for (int k = 0; k < n; ++k) {
        const double d = theta1[k] - theta2[k];
        acc += d * d * inv2s2;
      }
      break;
    }
    case NoiseKind::Gamma: {
      require_positive(theta1, "gamma theta1");
      require_positive(theta2, "gamma theta2");
      for (int k = 0; k < n; ++k) {
        const double r = theta1[k] / theta2[k];
        acc += model.looks * (r - 1.0 - std::log(r));
      }
      break;
    }
    case NoiseKind::Poisson: {
      require_positive(theta1, "poisson theta1");
      require_positive(theta2, "poisson theta2");
      for (int k = 0; k < n; ++k)
        acc += theta1[k] * std::log(theta1[k] / theta2[k]) + theta2[k] - theta1[k];
      break;
    }
  }
  return acc / static_cast<double>(n); // per-pixel mean, so nu is patch-size independent
}

StabilizedPatch stabilize(const NoiseModel& model, const Patch& x) {
  StabilizedPatch out{x, 1.0};
  switch (model.kind) {
    case NoiseKind::Gaussian:
      out.sigma = model.sigma;
      return out;
    case NoiseKind::Gamma: {
      for (double& v : out.patch.values) {
        if (!(v > 0.0)) throw InvalidInputError("stabilize: log of non-positive value");
        v = std::log(v);
      }
      out.sigma = std::sqrt(boost::math::trigamma(model.looks));
      return out;
    }
    case NoiseKind::Poisson: {
      for (double& v : out.patch.values) {
        if (!(v >= 0.0)) throw InvalidInputError("stabilize: negative value under Poisson");
        v = 2.0 * std::sqrt(v + 0.375);
      }
      out.sigma = 1.0;
      return out;
    }
  }
  throw InvalidInputError("stabilize: unknown noise kind");
}

SnrCalibration calibrate_snr(NoiseKind kind, const Dictionary& dict, double target_db) {
  if (dict.empty()) throw InvalidInputError("calibrate_snr: empty dictionary");

  // Pixel-value statistics over the whole dictionary.
  double sum = 0.0, sum2 = 0.0;
  std::size_t count = 0;
  for (const Patch& a : dict.atoms) {
    for (const double v : a.values) {
      sum += v;
      sum2 += v * v;
      ++count;
    }
  }
  const double m1 = sum / static_cast<double>(count);
  const double m2 = sum2 / static_cast<double>(count);
  const double var = m2 - m1 * m1;
  if (!(var > 0.0)) throw InvalidInputError("calibrate_snr: constant dictionary");

  const double ratio = std::pow(10.0, target_db / 10.0); // signal var / noise var
  switch (kind) {
    case NoiseKind::Gaussian:
      return {NoiseModel::gaussian(std::sqrt(var / ratio)), 1.0};
    case NoiseKind::Gamma: {
      // mean noise variance = mean(theta^2)/L
      return {NoiseModel::gamma(m2 * ratio / var), 1.0};
    }
    case NoiseKind::Poisson: {
      // After scaling theta by c: signal var c^2*var, mean noise var c*m1.
      if (!(m1 > 0.0)) throw InvalidInputError("calibrate_snr: non-positive mean intensity");
      return {NoiseModel::poisson(), ratio * m1 / var};
    }
  }
  throw InvalidInputError("calibrate_snr: unknown noise kind");
}

} // namespace patchglr
