#pragma once

#include <cstdint>

#include "patchglr/patch.hpp"

namespace patchglr {

/// Deterministic 8-bit grayscale test texture: a mix of oriented gratings,
/// smooth ramps and blob-like structures, quantized to [0, 255]. Gives
/// k-means enough distinct patch geometry to fill a couple hundred atoms.
Image make_texture(int width, int height, std::uint64_t seed);

} // namespace patchglr
