// Parallel kernels against their serial references.
#include <benchmark/benchmark.h>

#include "ubp/blur.hpp"
#include "ubp/eval.hpp"
#include "ubp/matrix.hpp"
#include "ubp/rng.hpp"
#include "ubp/synthetic.hpp"

namespace {

ubp::MatrixF random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
  ubp::Rng rng(seed);
  ubp::MatrixF m(r, c);
  for (float& v : m.data()) v = static_cast<float>(rng.normal());
  return m;
}

void BM_MatmulParallel(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_matrix(n, n, 1), b = random_matrix(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(ubp::matmul(a, b));
}
void BM_MatmulReference(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_matrix(n, n, 1), b = random_matrix(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(ubp::reference::matmul(a, b));
}
BENCHMARK(BM_MatmulParallel)->Arg(128)->Arg(256);
BENCHMARK(BM_MatmulReference)->Arg(128)->Arg(256);

ubp::Image texture(std::size_t size) {
  return ubp::render_texture(ubp::Rng(3), ubp::Rng(4), size, 3);
}

void BM_BlurParallel(benchmark::State& state) {
  const auto img = texture(static_cast<std::size_t>(state.range(0)));
  const auto k = ubp::radius_to_kernel(11.0);
  for (auto _ : state) benchmark::DoNotOptimize(ubp::uniform_blur(img, k));
}
void BM_BlurReference(benchmark::State& state) {
  const auto img = texture(static_cast<std::size_t>(state.range(0)));
  const auto k = ubp::radius_to_kernel(11.0);
  for (auto _ : state) benchmark::DoNotOptimize(ubp::reference::uniform_blur(img, k));
}
BENCHMARK(BM_BlurParallel)->Arg(64)->Arg(224);
BENCHMARK(BM_BlurReference)->Arg(64)->Arg(224);

void BM_RankParallel(benchmark::State& state) {
  const auto q = random_matrix(200, 64, 5), g = random_matrix(200, 64, 6);
  std::vector<std::size_t> truth(200);
  for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = i;
  for (auto _ : state) benchmark::DoNotOptimize(ubp::rank_gallery(q, g, truth));
}
void BM_RankReference(benchmark::State& state) {
  const auto q = random_matrix(200, 64, 5), g = random_matrix(200, 64, 6);
  std::vector<std::size_t> truth(200);
  for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = i;
  for (auto _ : state) benchmark::DoNotOptimize(ubp::reference::rank_gallery(q, g, truth));
}
BENCHMARK(BM_RankParallel);
BENCHMARK(BM_RankReference);

}  // namespace

BENCHMARK_MAIN();
