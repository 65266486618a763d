// Shared test utilities: random instance generators, the grid-search oracles
// for the log-affine ML fits, and the tiled-image builder for denoising runs.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "patchglr/dictionary.hpp"
#include "patchglr/noise.hpp"
#include "patchglr/patch.hpp"
#include "patchglr/rng.hpp"
#include "patchglr/transform.hpp"

namespace testutil {

using patchglr::Dictionary;
using patchglr::Image;
using patchglr::Patch;

inline Patch uniform_patch(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = u(rng);
  return Patch::flat(std::move(v));
}

inline Patch gaussian_patch(std::mt19937_64& rng, int n, double mean, double sd) {
  std::normal_distribution<double> g(mean, sd);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = g(rng);
  return Patch::flat(std::move(v));
}

// ---------------------------------------------------------------------------
// Grid-search oracles on the exact negative log-likelihood, computed straight
// from the density formulas (no shared code with the Newton fits). Constant
// terms in x are dropped; comparisons are against the same expression.
// ---------------------------------------------------------------------------

struct GridMin {
  double alpha = 0.0;
  double beta = 0.0;
  double value = 0.0;
};

inline GridMin gamma_nll_grid_min(const Patch& x, const Patch& a, double looks, double alpha_lo,
                                  double alpha_hi, double beta_lo, double beta_hi, int steps) {
  GridMin best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  const int n = x.size();
  std::vector<double> log_a(static_cast<std::size_t>(n));
  double sum_log_a = 0.0;
  for (int k = 0; k < n; ++k) {
    log_a[static_cast<std::size_t>(k)] = std::log(a[k]);
    sum_log_a += log_a[static_cast<std::size_t>(k)];
  }
  for (int i = 0; i < steps; ++i) {
    const double alpha = alpha_lo + (alpha_hi - alpha_lo) * i / (steps - 1);
    double sum_x_over_pow = 0.0; // sum_k x_k / a_k^alpha
    for (int k = 0; k < n; ++k)
      sum_x_over_pow += x[k] * std::exp(-alpha * log_a[static_cast<std::size_t>(k)]);
    for (int j = 0; j < steps; ++j) {
      const double beta = beta_lo + (beta_hi - beta_lo) * j / (steps - 1);
      // -sum log p(x_k | beta a_k^alpha) up to x-only terms:
      //   L*( N log beta + alpha*sum log a + (1/beta) sum x/a^alpha )
      const double nll =
          looks * (n * std::log(beta) + alpha * sum_log_a + sum_x_over_pow / beta);
      if (nll < best.value) best = {alpha, beta, nll};
    }
  }
  return best;
}

inline GridMin poisson_nll_grid_min(const Patch& x, const Patch& a, double alpha_lo,
                                    double alpha_hi, double beta_lo, double beta_hi, int steps) {
  GridMin best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  const int n = x.size();
  std::vector<double> log_a(static_cast<std::size_t>(n));
  double sum_x = 0.0, sum_x_log_a = 0.0;
  for (int k = 0; k < n; ++k) {
    log_a[static_cast<std::size_t>(k)] = std::log(a[k]);
    sum_x += x[k];
    sum_x_log_a += x[k] * log_a[static_cast<std::size_t>(k)];
  }
  for (int i = 0; i < steps; ++i) {
    const double alpha = alpha_lo + (alpha_hi - alpha_lo) * i / (steps - 1);
    double sum_pow = 0.0;
    for (int k = 0; k < n; ++k)
      sum_pow += std::exp(alpha * log_a[static_cast<std::size_t>(k)]);
    for (int j = 0; j < steps; ++j) {
      const double beta = beta_lo + (beta_hi - beta_lo) * j / (steps - 1);
      // -sum log p = beta*sum a^alpha - sum x log(beta a^alpha) + x-only terms
      const double nll = beta * sum_pow - sum_x * std::log(beta) - alpha * sum_x_log_a;
      if (nll < best.value) best = {alpha, beta, nll};
    }
  }
  return best;
}

// Same dropped-constant objectives evaluated at a point, for comparing the
// fitted estimate against the grid minimum.
inline double gamma_nll_at(const Patch& x, const Patch& a, double looks, double alpha,
                           double beta) {
  double s = 0.0;
  for (int k = 0; k < x.size(); ++k) {
    const double la = std::log(a[k]);
    s += std::log(beta) + alpha * la + x[k] * std::exp(-alpha * la) / beta;
  }
  return looks * s;
}

inline double poisson_nll_at(const Patch& x, const Patch& a, double alpha, double beta) {
  // Same term grouping as the grid expression.
  double s = 0.0;
  for (int k = 0; k < x.size(); ++k) {
    const double la = std::log(a[k]);
    s += beta * std::exp(alpha * la) - x[k] * (std::log(beta) + alpha * la);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Tiled test images: every patch-sized tile is a randomly transformed atom,
// with the log-affine beta rescaled so tiles stay at a comparable brightness.
// ---------------------------------------------------------------------------

struct TiledImage {
  Image clean;
  std::vector<int> atom_of_tile;
};

inline TiledImage tile_from_atoms(const Dictionary& dict, int tiles_x, int tiles_y,
                                  std::uint64_t seed, double mean_brightness = 130.0) {
  using patchglr::substream;
  const int w = dict.patch_width, h = dict.patch_height;
  TiledImage out;
  out.clean = Image(tiles_x * w, tiles_y * h, 0.0);
  std::mt19937_64 rng(patchglr::splitmix64(seed));
  std::uniform_int_distribution<std::size_t> pick(0, dict.size() - 1);
  std::uniform_real_distribution<double> alpha_u(0.8, 1.25);
  std::uniform_real_distribution<double> bright_u(0.7, 1.4);
  for (int ty = 0; ty < tiles_y; ++ty) {
    for (int tx = 0; tx < tiles_x; ++tx) {
      const std::size_t j = pick(rng);
      out.atom_of_tile.push_back(static_cast<int>(j));
      const double alpha = alpha_u(rng);
      double mean_pow = 0.0;
      for (const double v : dict[j].values) mean_pow += std::pow(v, alpha);
      mean_pow /= static_cast<double>(dict[j].values.size());
      // Tile brightness drawn around mean_brightness so tiles stay comparable.
      const double beta = mean_brightness * bright_u(rng) / mean_pow;
      const Patch tile =
          patchglr::apply(patchglr::RadiometricTransform::log_affine(alpha, beta), dict[j]);
      for (int dy = 0; dy < h; ++dy)
        for (int dx = 0; dx < w; ++dx)
          out.clean.at(tx * w + dx, ty * h + dy) = tile[dy * w + dx];
    }
  }
  return out;
}

// Kolmogorov-Smirnov statistic of samples against a CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

} // namespace testutil
