// Microbenchmarks for the hot paths: criterion evaluation on 8x8 patches,
// the log-affine ML fits, and single-patch denoising.

#include <benchmark/benchmark.h>

#include <random>

#include "patchglr/criteria.hpp"
#include "patchglr/denoise.hpp"
#include "patchglr/texture.hpp"

using namespace patchglr;

namespace {

Patch random_patch(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = u(rng);
  return Patch::flat(std::move(v));
}

struct Fixture {
  Patch atom;
  Patch gaussian_x;
  Patch gamma_x;
  Patch poisson_x;
  Patch poisson_atom;

  Fixture() {
    std::mt19937_64 rng(7);
    atom = random_patch(rng, 64, 1.0, 255.0);
    gaussian_x = sample(NoiseModel::gaussian(40.0), atom, 1);
    gamma_x = sample(NoiseModel::gamma(10.0),
                     apply(RadiometricTransform::log_affine(1.2, 1.5), atom), 2);
    poisson_atom = random_patch(rng, 64, 0.3, 7.0);
    poisson_x = sample(NoiseModel::poisson(),
                       apply(RadiometricTransform::log_affine(1.1, 1.4), poisson_atom), 3);
  }
};

const Fixture& fixture() {
  static Fixture f;
  return f;
}

} // namespace

static void BM_Correlation(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(correlation(f.gaussian_x, f.atom).value);
}
BENCHMARK(BM_Correlation);

static void BM_GlrGaussian(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(glr_gaussian(f.gaussian_x, f.atom, 40.0).value);
}
BENCHMARK(BM_GlrGaussian);

static void BM_GlrGamma(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(glr_gamma(f.gamma_x, f.atom, 10.0).value);
}
BENCHMARK(BM_GlrGamma);

static void BM_GlrPoisson(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(glr_poisson(f.poisson_x, f.poisson_atom).value);
}
BENCHMARK(BM_GlrPoisson);

static void BM_StabilizedGlrGamma(benchmark::State& state) {
  const auto& f = fixture();
  const NoiseModel m = NoiseModel::gamma(10.0);
  for (auto _ : state) benchmark::DoNotOptimize(stabilized_glr(m, f.gamma_x, f.atom).value);
}
BENCHMARK(BM_StabilizedGlrGamma);

static void BM_FitLogAffineGamma(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(fit_logaffine_gamma(f.gamma_x, f.atom, 10.0).transform.alpha);
}
BENCHMARK(BM_FitLogAffineGamma);

static void BM_DenoisePatch(benchmark::State& state) {
  const Image tex = make_texture(128, 128, 5);
  Dictionary dict =
      kmeans_dictionary(extract_patches(tex, 8, 8, 4), static_cast<int>(state.range(0)), 5);
  dict = floored(std::move(dict), positive_floor_epsilon(dict));
  const NoiseModel m = NoiseModel::gamma(10.0);
  const Patch x = sample(m, dict[0], 6);
  DenoiseOptions opts;
  opts.family = TransformFamily::LogAffine;
  for (auto _ : state) benchmark::DoNotOptimize(denoise_patch(x, dict, m, opts).z);
}
BENCHMARK(BM_DenoisePatch)->Arg(16)->Arg(64)->Arg(196);

BENCHMARK_MAIN();
