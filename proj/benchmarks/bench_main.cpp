#include "mrlr/lowrank.hpp"
#include "mrlr/projector.hpp"
#include "mrlr/regularizers.hpp"
#include "mrlr/wavelet.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace mrlr;

namespace {

ImageSequence random_sequence(Index frames, Index n, unsigned seed = 1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ImageSequence f(frames, n, n);
  for (auto &v : f.data())
    v = g(rng);
  return f;
}

} // namespace

static void BM_svt(benchmark::State &state) {
  const Index rows = state.range(0), cols = state.range(1);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Eigen::MatrixXd F = Eigen::MatrixXd::NullaryExpr(rows, cols, [&] { return g(rng); });
  for (auto _ : state)
    benchmark::DoNotOptimize(svt(F, 1.0));
}
BENCHMARK(BM_svt)->Args({64, 16})->Args({1024, 16})->Args({16384, 16});

static void BM_dwt2(benchmark::State &state) {
  const Index n = state.range(0);
  const auto filter = WaveletFilter::from_name("db3");
  const auto f = random_sequence(1, n);
  for (auto _ : state) {
    auto dec = dwt2(f.frame(0), filter, 3);
    benchmark::DoNotOptimize(idwt2(dec, filter));
  }
  state.SetComplexityN(n * n);
}
BENCHMARK(BM_dwt2)->RangeMultiplier(2)->Range(64, 512)->Complexity();

static void BM_projector(benchmark::State &state) {
  const Index n = state.range(0);
  std::vector<double> angles(19);
  for (std::size_t a = 0; a < angles.size(); ++a)
    angles[a] = static_cast<double>(a);
  const tomo::ParallelProjector p(tomo::ParallelGeometry::standard(n, n, angles));
  const auto f = random_sequence(1, n);
  for (auto _ : state) {
    Eigen::VectorXd s = p.apply(f.frame(0));
    benchmark::DoNotOptimize(p.adjoint(s));
  }
}
BENCHMARK(BM_projector)->Arg(128)->Arg(256);

static void BM_llr_prox(benchmark::State &state) {
  const Index n = state.range(0), p = state.range(1);
  const auto f = random_sequence(16, n);
  const LocalLowRank reg(PatchLayout::single(n, n, p, p));
  for (auto _ : state)
    benchmark::DoNotOptimize(reg.prox(f, 0.5));
}
BENCHMARK(BM_llr_prox)->Args({128, 4})->Args({128, 8})->Args({256, 8})->Unit(benchmark::kMillisecond);

static void BM_mrlr_prox(benchmark::State &state) {
  const Index n = state.range(0), p = state.range(1);
  const auto f = random_sequence(16, n);
  const std::vector<PatchSize> sizes(3, PatchSize{p, p});
  const MultiresolutionLowRank reg(WaveletFilter::from_name("db3"), 2,
                                   PatchLayout::pyramid(n, n, 2, sizes));
  for (auto _ : state)
    benchmark::DoNotOptimize(reg.prox(f, 0.5));
}
BENCHMARK(BM_mrlr_prox)->Args({128, 32})->Args({256, 64})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
