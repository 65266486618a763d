#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "patchglr/errors.hpp"

namespace patchglr {

/// An ordered vector of pixel values with a rectangular shape.
/// Used both for noisy observations x and for noise-free parameters theta;
/// values with identical index are in spatial correspondence.
struct Patch {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Patch() = default;

  Patch(int w, int h, std::vector<double> v) : width(w), height(h), values(std::move(v)) {
    if (w <= 0 || h <= 0 || static_cast<std::size_t>(w) * static_cast<std::size_t>(h) != values.size())
      throw InvalidInputError("Patch: width*height must match value count");
  }

  /// N x 1 column patch, handy for tests and scalar experiments.
  static Patch flat(std::vector<double> v) {
    const int n = static_cast<int>(v.size());
    return Patch(1, n, std::move(v));
  }

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int k) const { return values[static_cast<std::size_t>(k)]; }
  double& operator[](int k) { return values[static_cast<std::size_t>(k)]; }

  bool same_shape(const Patch& other) const {
    return width == other.width && height == other.height;
  }

  /// True when every value is exactly equal (zero spread).
  bool is_constant() const {
    for (const double v : values)
      if (v != values.front()) return false;
    return true;
  }
};

/// A full image, row-major. Shares the per-family domain constraints of Patch.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  Image() = default;

  Image(int w, int h, std::vector<double> p) : width(w), height(h), pixels(std::move(p)) {
    if (w <= 0 || h <= 0 || static_cast<std::size_t>(w) * static_cast<std::size_t>(h) != pixels.size())
      throw InvalidInputError("Image: width*height must match pixel count");
  }

  Image(int w, int h, double fill = 0.0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {
    if (w <= 0 || h <= 0) throw InvalidInputError("Image: dimensions must be positive");
  }

  double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double mean(const Patch& p) { return mean(p.values); }

} // namespace patchglr
