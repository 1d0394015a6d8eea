#include <benchmark/benchmark.h>

#include <random>

#include "ssdbench/geometry.hpp"
#include "ssdbench/grid.hpp"
#include "ssdbench/metrics.hpp"

using namespace ssdbench;

namespace {

SpatialDistribution random_grid(const Domain& domain, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ConfidenceGrid g{domain, std::vector<double>(domain_size(domain)), "obj", Task::k3D};
  for (auto& r : g.raw) r = u(rng) < 0.05 ? u(rng) : 0.0;
  return softmax_normalize(g);
}

ConfidenceCloud random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-10.0, 10.0), conf(0.0, 1.0);
  ConfidenceCloud c;
  c.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) c.points.push_back({Vec3(pos(rng), pos(rng), pos(rng)), conf(rng), "obj"});
  return c;
}

void BM_FindPeaks3D(benchmark::State& state) {
  const auto d = random_grid(VoxelDomain::centered(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(find_peaks(d, Thresholds{}));
}
BENCHMARK(BM_FindPeaks3D);

void BM_FindPeaks2D(benchmark::State& state) {
  const auto d = random_grid(ImageDomain{}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(find_peaks(d, Thresholds{}));
}
BENCHMARK(BM_FindPeaks2D);

void BM_NearestPeakDistance(benchmark::State& state) {
  const auto g = find_peaks(random_grid(VoxelDomain::centered(), 3), Thresholds{});
  const auto d = find_peaks(random_grid(VoxelDomain::centered(), 4), Thresholds{});
  for (auto _ : state) benchmark::DoNotOptimize(nn_distance(g, d));
}
BENCHMARK(BM_NearestPeakDistance);

void BM_PoolNonzeroMean(benchmark::State& state) {
  const auto cloud = random_cloud(static_cast<std::size_t>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(pool_nonzero_mean(cloud, VoxelDomain::centered()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PoolNonzeroMean)->Arg(10000)->Arg(100000);

void BM_OutlierFilter(benchmark::State& state) {
  const auto cloud = random_cloud(static_cast<std::size_t>(state.range(0)), 6);
  for (auto _ : state) benchmark::DoNotOptimize(outlier_filter(cloud));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OutlierFilter)->Arg(5000)->Arg(50000);

}  // namespace
BENCHMARK_MAIN();
