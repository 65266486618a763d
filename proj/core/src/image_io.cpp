#include "patchglr/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace patchglr {

namespace {

// PNM token reader: whitespace-separated, '#' comments to end of line.
int next_pnm_int(std::istream& is, const char* what) {
  int c = is.get();
  while (c != EOF && (std::isspace(c) || c == '#')) {
    if (c == '#')
      while (c != EOF && c != '\n') c = is.get();
    else
      c = is.get();
  }
  if (c == EOF) throw IoError(std::string("PGM: missing ") + what);
  std::string token;
  while (c != EOF && !std::isspace(c)) {
    token.push_back(static_cast<char>(c));
    c = is.get();
  }
  try {
    return std::stoi(token);
  } catch (...) {
    throw IoError(std::string("PGM: bad ") + what + " '" + token + "'");
  }
}

} // namespace

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("read_pgm: cannot open " + path.string());
  char p = 0, kind = 0;
  is.get(p);
  is.get(kind);
  if (p != 'P' || (kind != '2' && kind != '5'))
    throw IoError("read_pgm: not a P2/P5 file: " + path.string());
  const int width = next_pnm_int(is, "width");
  const int height = next_pnm_int(is, "height");
  const int maxval = next_pnm_int(is, "maxval");
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535)
    throw IoError("read_pgm: bad header in " + path.string());

  Image img(width, height, 0.0);
  if (kind == '2') {
    for (double& v : img.pixels) v = next_pnm_int(is, "pixel");
  } else {
    // Binary samples start right after the single whitespace ending maxval
    // (already consumed by the token reader); 16-bit samples are big-endian.
    const int bytes = maxval > 255 ? 2 : 1;
    for (double& v : img.pixels) {
      int hi = is.get();
      if (bytes == 2) {
        const int lo = is.get();
        if (lo == EOF) throw IoError("read_pgm: truncated " + path.string());
        hi = hi * 256 + lo;
      }
      if (hi == EOF) throw IoError("read_pgm: truncated " + path.string());
      v = hi;
    }
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const Image& image, int maxval, bool binary) {
  if (maxval <= 0 || maxval > 65535) throw IoError("write_pgm: maxval must be in [1, 65535]");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("write_pgm: cannot open " + path.string());
  os << (binary ? "P5" : "P2") << "\n" << image.width << " " << image.height << "\n"
     << maxval << "\n";
  auto quantize = [maxval](double v) {
    const long q = std::lround(std::clamp(v, 0.0, static_cast<double>(maxval)));
    return static_cast<int>(q);
  };
  if (binary) {
    for (const double v : image.pixels) {
      const int q = quantize(v);
      if (maxval > 255) os.put(static_cast<char>((q >> 8) & 0xff));
      os.put(static_cast<char>(q & 0xff));
    }
  } else {
    for (int y = 0; y < image.height; ++y) {
      for (int x = 0; x < image.width; ++x)
        os << quantize(image.at(x, y)) << (x + 1 == image.width ? "" : " ");
      os << "\n";
    }
  }
  if (!os) throw IoError("write_pgm: write failed for " + path.string());
}

Image read_matrix(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("read_matrix: cannot open " + path.string());
  int width = 0, height = 0;
  if (!(is >> width >> height) || width <= 0 || height <= 0)
    throw IoError("read_matrix: bad header in " + path.string());
  Image img(width, height, 0.0);
  for (double& v : img.pixels)
    if (!(is >> v)) throw IoError("read_matrix: truncated " + path.string());
  return img;
}

void write_matrix(const std::filesystem::path& path, const Image& image) {
  std::ofstream os(path);
  if (!os) throw IoError("write_matrix: cannot open " + path.string());
  os << image.width << " " << image.height << "\n";
  char buf[40];
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      std::snprintf(buf, sizeof(buf), "%.17g", image.at(x, y));
      os << buf << (x + 1 == image.width ? "" : " ");
    }
    os << "\n";
  }
  if (!os) throw IoError("write_matrix: write failed for " + path.string());
}

Image read_image(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("read_image: cannot open " + path.string());
  char magic[2] = {0, 0};
  probe.read(magic, 2);
  probe.close();
  if (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5')) return read_pgm(path);
  return read_matrix(path);
}

} // namespace patchglr
