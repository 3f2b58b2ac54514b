#include <benchmark/benchmark.h>

#include <pcae/linalg.hpp>
#include <pcae/random.hpp>
#include <pcae/theory.hpp>

namespace {

void BM_SymEig(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  pcae::Rng rng = pcae::make_rng(1);
  const pcae::Matrix a = pcae::random_psd(p, rng);
  for (auto _ : state) benchmark::DoNotOptimize(pcae::sym_eig(a));
}
BENCHMARK(BM_SymEig)->Arg(4)->Arg(16)->Arg(64);

void BM_Covariance(benchmark::State& state) {
  pcae::Rng rng = pcae::make_rng(2);
  const pcae::Matrix x = pcae::center(pcae::gaussian_matrix(16, static_cast<std::size_t>(state.range(0)), rng));
  for (auto _ : state) benchmark::DoNotOptimize(pcae::covariance(x));
}
BENCHMARK(BM_Covariance)->Arg(1000)->Arg(8000);

void BM_SolveStiefel(benchmark::State& state) {
  pcae::Rng rng = pcae::make_rng(3);
  pcae::StiefelProblem prob;
  prob.sigma = pcae::random_psd(6, rng);
  prob.gammas = {0.2, 0.5, 0.8, 1.1, 1.4, 1.7};
  for (auto _ : state) benchmark::DoNotOptimize(pcae::solve_stiefel(prob, 3));
}
BENCHMARK(BM_SolveStiefel)->Unit(benchmark::kMillisecond);

}  // namespace
