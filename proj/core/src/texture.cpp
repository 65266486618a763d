#include "patchglr/texture.hpp"

#include <algorithm>
#include <cmath>

#include "patchglr/rng.hpp"

namespace patchglr {

Image make_texture(int width, int height, std::uint64_t seed) {
  if (width <= 0 || height <= 0) throw InvalidInputError("make_texture: bad dimensions");

  // Seed-driven phases and frequencies so different seeds give different
  // textures while a given seed is fully reproducible.
  auto u01 = [seed](std::uint64_t tag) {
    return static_cast<double>(substream(seed, stream::texture, tag) >> 11) * 0x1.0p-53;
  };
  const double ph1 = 6.2831853 * u01(1);
  const double ph2 = 6.2831853 * u01(2);
  const double ph3 = 6.2831853 * u01(3);
  const double f1 = 0.22 + 0.2 * u01(4);
  const double f2 = 0.35 + 0.25 * u01(5);
  const double f3 = 0.08 + 0.05 * u01(6);

  Image img(width, height, 0.0);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double fx = static_cast<double>(x);
      const double fy = static_cast<double>(y);
      // Slowly rotating orientation field gives Barbara-like stripe patches
      // of many orientations and scales.
      const double ang = 0.9 * std::sin(f3 * fx + ph3) + 1.3 * std::cos(0.7 * f3 * fy - ph2);
      const double u = std::cos(ang) * fx + std::sin(ang) * fy;
      const double v = -std::sin(ang) * fx + std::cos(ang) * fy;
      double s = 0.0;
      s += 52.0 * std::sin(f1 * u + ph1);
      s += 34.0 * std::sin(f2 * v + ph2 + 0.8 * std::sin(0.021 * fx));
      s += 26.0 * std::sin(0.5 * f1 * (fx + fy) + ph3);
      // Smooth luminance ramp plus a few soft blobs for flat-ish regions.
      s += 18.0 * std::sin(0.013 * fx - ph1) + 12.0 * std::cos(0.017 * fy + ph2);
      const double bx = std::fmod(fx * 0.031 + 7.0 * u01(7), 4.0) - 2.0;
      const double by = std::fmod(fy * 0.027 + 5.0 * u01(8), 4.0) - 2.0;
      s += 30.0 * std::exp(-(bx * bx + by * by));
      img.at(x, y) = std::clamp(128.0 + 0.85 * s, 0.0, 255.0);
    }
  }
  // Quantize to the 8-bit grid so the texture behaves like a real PGM source.
  for (double& p : img.pixels) p = std::round(p);
  return img;
}

} // namespace patchglr
