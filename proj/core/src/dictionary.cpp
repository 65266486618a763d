#include "patchglr/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include "patchglr/errors.hpp"
#include "patchglr/rng.hpp"

namespace patchglr {

std::vector<Patch> extract_patches(const Image& image, int w, int h, int stride) {
  if (w <= 0 || h <= 0 || stride < 1)
    throw InvalidInputError("extract_patches: bad patch size or stride");
  if (image.width < w || image.height < h)
    throw InvalidInputError("extract_patches: image smaller than patch");
  std::vector<Patch> out;
  out.reserve(static_cast<std::size_t>(((image.width - w) / stride + 1)) *
              static_cast<std::size_t>(((image.height - h) / stride + 1)));
  for (int y = 0; y + h <= image.height; y += stride) {
    for (int x = 0; x + w <= image.width; x += stride) {
      std::vector<double> v(static_cast<std::size_t>(w) * h);
      for (int dy = 0; dy < h; ++dy)
        for (int dx = 0; dx < w; ++dx)
          v[static_cast<std::size_t>(dy) * w + dx] = image.at(x + dx, y + dy);
      out.emplace_back(w, h, std::move(v));
    }
  }
  return out;
}

std::vector<std::pair<int, int>> covering_positions(int image_w, int image_h, int w, int h,
                                                    int stride) {
  if (image_w < w || image_h < h)
    throw InvalidInputError("covering_positions: image smaller than patch");
  auto axis = [stride](int image_dim, int patch_dim) {
    std::vector<int> pos;
    for (int p = 0; p + patch_dim <= image_dim; p += stride) pos.push_back(p);
    if (pos.back() != image_dim - patch_dim) pos.push_back(image_dim - patch_dim);
    return pos;
  };
  const std::vector<int> xs = axis(image_w, w);
  const std::vector<int> ys = axis(image_h, h);
  std::vector<std::pair<int, int>> out;
  out.reserve(xs.size() * ys.size());
  for (const int y : ys)
    for (const int x : xs) out.emplace_back(x, y);
  return out;
}

namespace {

double sq_distance(const Patch& p, const std::vector<double>& centroid) {
  double d = 0.0;
  for (std::size_t k = 0; k < centroid.size(); ++k) {
    const double diff = p.values[k] - centroid[k];
    d += diff * diff;
  }
  return d;
}

} // namespace

Dictionary kmeans_dictionary(const std::vector<Patch>& patches, int k, std::uint64_t seed,
                             int max_iters) {
  if (patches.empty()) throw InvalidInputError("kmeans_dictionary: no patches");
  if (k < 1 || static_cast<std::size_t>(k) > patches.size())
    throw InvalidInputError("kmeans_dictionary: k must be in [1, patch count]");
  const std::size_t n = patches.size();
  const std::size_t dim = patches.front().values.size();
  for (const Patch& p : patches)
    if (p.values.size() != dim) throw InvalidInputError("kmeans_dictionary: mixed patch sizes");

  auto rng = make_rng(substream(seed, stream::kmeans));

  // k-means++ seeding.
  std::vector<std::vector<double>> centroids;
  centroids.reserve(static_cast<std::size_t>(k));
  std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
  {
    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    centroids.push_back(patches[first(rng)].values);
  }
  while (centroids.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      min_d2[i] = std::min(min_d2[i], sq_distance(patches[i], centroids.back()));
      total += min_d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (; pick + 1 < n; ++pick) {
        target -= min_d2[pick];
        if (target <= 0.0) break;
      }
    } else {
      std::uniform_int_distribution<std::size_t> any(0, n - 1);
      pick = any(rng);
    }
    centroids.push_back(patches[pick].values);
  }

  std::vector<std::size_t> assign(n, 0);
  std::vector<double> dist(n, 0.0);
  double prev_objective = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iters; ++iter) {
    // Assignment.
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_j = 0;
      for (std::size_t j = 0; j < centroids.size(); ++j) {
        const double d = sq_distance(patches[i], centroids[j]);
        if (d < best) {
          best = d;
          best_j = j;
        }
      }
      assign[i] = best_j;
      dist[i] = best;
      objective += best;
    }
    if (objective > prev_objective * (1.0 + 1e-12))
      throw Error("kmeans_dictionary: objective increased"); // Lloyd must be monotone

    // Update.
    std::vector<std::size_t> count(centroids.size(), 0);
    for (auto& c : centroids) std::fill(c.begin(), c.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      count[assign[i]]++;
      for (std::size_t d = 0; d < dim; ++d) centroids[assign[i]][d] += patches[i].values[d];
    }
    for (std::size_t j = 0; j < centroids.size(); ++j) {
      if (count[j] == 0) continue;
      for (double& v : centroids[j]) v /= static_cast<double>(count[j]);
    }
    // Re-seed empty clusters from the farthest patches.
    for (std::size_t j = 0; j < centroids.size(); ++j) {
      if (count[j] != 0) continue;
      std::size_t far = static_cast<std::size_t>(
          std::max_element(dist.begin(), dist.end()) - dist.begin());
      centroids[j] = patches[far].values;
      dist[far] = 0.0; // don't pick the same patch for two empty clusters
    }

    const bool small_change = std::isfinite(prev_objective) &&
                              std::abs(prev_objective - objective) <= 1e-6 * prev_objective;
    prev_objective = objective;
    if (small_change) break;
  }

  Dictionary dict;
  dict.patch_width = patches.front().width;
  dict.patch_height = patches.front().height;
  dict.atoms.reserve(centroids.size());
  for (auto& c : centroids)
    dict.atoms.emplace_back(dict.patch_width, dict.patch_height, std::move(c));
  return dict;
}

RadiometricTransform random_transform(TransformFamily family, std::uint64_t rng_seed,
                                      Interval alpha_range, Interval beta_range) {
  if (!(alpha_range.lo <= alpha_range.hi) || !(beta_range.lo <= beta_range.hi))
    throw InvalidInputError("random_transform: empty range");
  if (alpha_range.lo <= 0.0 && alpha_range.hi >= 0.0)
    throw InvalidInputError("random_transform: alpha range must exclude 0");
  if (family == TransformFamily::LogAffine && !(alpha_range.lo > 0.0 && beta_range.lo > 0.0))
    throw InvalidInputError("random_transform: log-affine needs positive alpha and beta");

  auto rng = make_rng(rng_seed);
  auto draw = [&rng](Interval r) {
    if (r.lo == r.hi) return r.lo;
    std::uniform_real_distribution<double> u(r.lo, r.hi);
    return u(rng);
  };
  const double alpha = draw(alpha_range);
  const double beta = draw(beta_range);
  return family == TransformFamily::Affine ? RadiometricTransform::affine(alpha, beta)
                                           : RadiometricTransform::log_affine(alpha, beta);
}

Interval default_alpha_range(TransformFamily) { return {0.5, 2.0}; }

Interval default_beta_range(TransformFamily family) {
  return family == TransformFamily::Affine ? Interval{-64.0, 64.0} : Interval{0.5, 2.0};
}

Dictionary floored(Dictionary dict, double eps) {
  for (Patch& a : dict.atoms)
    for (double& v : a.values) v = std::max(v, eps);
  return dict;
}

double positive_floor_epsilon(const Dictionary& dict) {
  double max_v = 0.0;
  for (const Patch& a : dict.atoms)
    for (const double v : a.values) max_v = std::max(max_v, v);
  if (!(max_v > 0.0)) throw InvalidInputError("positive_floor_epsilon: no positive atom values");
  return 1e-3 * max_v;
}

Dictionary scaled(Dictionary dict, double factor) {
  if (!(factor > 0.0)) throw InvalidInputError("scaled: factor must be positive");
  for (Patch& a : dict.atoms)
    for (double& v : a.values) v *= factor;
  return dict;
}

namespace {

constexpr char kMagic[6] = {'P', 'G', 'L', 'R', 'D', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

} // namespace

void save_dictionary(const Dictionary& dict, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("save_dictionary: cannot open " + path.string());
  os.write(kMagic, sizeof(kMagic));
  put_u32(os, static_cast<std::uint32_t>(dict.patch_width));
  put_u32(os, static_cast<std::uint32_t>(dict.patch_height));
  put_u32(os, static_cast<std::uint32_t>(dict.atoms.size()));
  for (const Patch& a : dict.atoms)
    for (const double v : a.values) put_f64(os, v);
  if (!os) throw IoError("save_dictionary: write failed for " + path.string());
}

Dictionary load_dictionary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("load_dictionary: cannot open " + path.string());
  char magic[6];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError("load_dictionary: bad magic in " + path.string());
  Dictionary dict;
  dict.patch_width = static_cast<int>(get_u32(is));
  dict.patch_height = static_cast<int>(get_u32(is));
  const std::uint32_t count = get_u32(is);
  if (!is || dict.patch_width <= 0 || dict.patch_height <= 0)
    throw IoError("load_dictionary: corrupt header in " + path.string());
  const std::size_t dim =
      static_cast<std::size_t>(dict.patch_width) * static_cast<std::size_t>(dict.patch_height);
  dict.atoms.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::vector<double> v(dim);
    for (double& value : v) value = get_f64(is);
    if (!is) throw IoError("load_dictionary: truncated file " + path.string());
    dict.atoms.emplace_back(dict.patch_width, dict.patch_height, std::move(v));
  }
  return dict;
}

} // namespace patchglr
