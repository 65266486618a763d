#pragma once

#include <filesystem>

#include "patchglr/patch.hpp"

namespace patchglr {

/// PGM (P2 ASCII / P5 binary, maxval up to 65535) readers and writers.
/// 16-bit P5 samples are big-endian per the PNM convention.
Image read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Image& image, int maxval = 255,
               bool binary = true);

/// Float-valued textual matrix for exact pipelines: one "width height"
/// header line, then height rows of width values at full precision.
Image read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Image& image);

/// Dispatch by content: a "P2"/"P5" magic reads as PGM, anything else as
/// the matrix format.
Image read_image(const std::filesystem::path& path);

} // namespace patchglr
