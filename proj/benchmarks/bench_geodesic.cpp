#include <benchmark/benchmark.h>

#include <pcae/datasets.hpp>
#include <pcae/geodesic.hpp>

namespace {

void BM_KnnGraph(benchmark::State& state) {
  const auto ds = pcae::gen_swiss_roll(static_cast<std::size_t>(state.range(0)), 0.0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(pcae::build_knn_graph(ds.samples, 10));
}
BENCHMARK(BM_KnnGraph)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_Dijkstra(benchmark::State& state) {
  const auto ds = pcae::gen_swiss_roll(static_cast<std::size_t>(state.range(0)), 0.0, 1);
  const auto g = pcae::build_knn_graph(ds.samples, 10);
  for (auto _ : state) benchmark::DoNotOptimize(pcae::shortest_paths_from(g, 0));
}
BENCHMARK(BM_Dijkstra)->Arg(1000)->Arg(8000)->Unit(benchmark::kMicrosecond);

void BM_LandmarkIndex(benchmark::State& state) {
  const auto ds = pcae::gen_swiss_roll(2000, 0.0, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(pcae::build_index(ds.samples, 10, static_cast<std::size_t>(state.range(0)), 1));
}
BENCHMARK(BM_LandmarkIndex)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace
