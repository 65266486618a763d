#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "patchglr/patch.hpp"
#include "patchglr/transform.hpp"

namespace patchglr {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// An ordered, index-addressable collection of same-sized atoms.
/// Atom order is stable; tie-breaking contracts depend on it.
struct Dictionary {
  std::vector<Patch> atoms;
  int patch_width = 0;
  int patch_height = 0;
  bool normalized = false;

  std::size_t size() const { return atoms.size(); }
  bool empty() const { return atoms.empty(); }
  const Patch& operator[](std::size_t i) const { return atoms[i]; }
};

/// Row-major sliding-window extraction with the given stride.
/// Yields floor((W-w)/stride)+1 by floor((H-h)/stride)+1 patches.
std::vector<Patch> extract_patches(const Image& image, int w, int h, int stride);

/// Top-left patch positions covering the whole image: the stride grid plus
/// the final row/column offsets, so every pixel belongs to some patch.
std::vector<std::pair<int, int>> covering_positions(int image_w, int image_h, int w, int h,
                                                    int stride);

/// Lloyd k-means with k-means++ seeding, deterministic given the seed.
/// Empty clusters are re-seeded from the patch farthest from its centroid.
Dictionary kmeans_dictionary(const std::vector<Patch>& patches, int k, std::uint64_t seed,
                             int max_iters = 100);

/// Uniform draw of transform parameters from the given ranges.
RadiometricTransform random_transform(TransformFamily family, std::uint64_t rng_seed,
                                      Interval alpha_range, Interval beta_range);

/// Default parameter ranges for randomly transformed templates
/// (8-bit-scaled data).
Interval default_alpha_range(TransformFamily family);
Interval default_beta_range(TransformFamily family);

/// Copy with every atom value clamped from below; gamma/Poisson likelihoods
/// need strictly positive atoms.
Dictionary floored(Dictionary dict, double eps);

/// The flooring level used for gamma/Poisson experiments:
/// 1e-3 times the largest atom value.
double positive_floor_epsilon(const Dictionary& dict);

/// Copy with every atom scaled by a positive factor.
Dictionary scaled(Dictionary dict, double factor);

/// Dictionary container format "PGLRD1": 6-byte magic, three little-endian
/// uint32 (patch_width, patch_height, atom count), then row-major atom
/// values as little-endian IEEE float64. Round-trips bit-exactly.
void save_dictionary(const Dictionary& dict, const std::filesystem::path& path);
Dictionary load_dictionary(const std::filesystem::path& path);

} // namespace patchglr
