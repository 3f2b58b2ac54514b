#include <benchmark/benchmark.h>

#include <numeric>

#include <pcae/datasets.hpp>
#include <pcae/geodesic.hpp>
#include <pcae/network.hpp>
#include <pcae/objective.hpp>
#include <pcae/random.hpp>
#include <pcae/trainer.hpp>

namespace {

const std::vector<std::size_t> kEnc{16, 128, 128, 16};
const std::vector<std::size_t> kDec{16, 128, 128, 16};

void BM_Forward(benchmark::State& state) {
  const auto m = pcae::init_model(kEnc, kDec, 1);
  pcae::Rng rng = pcae::make_rng(1);
  const auto x = pcae::gaussian_matrix(16, static_cast<std::size_t>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(pcae::forward(m, x));
}
BENCHMARK(BM_Forward)->Arg(256)->Arg(1024);

void BM_ForwardBackward(benchmark::State& state) {
  auto m = pcae::init_model(kEnc, kDec, 1);
  pcae::Rng rng = pcae::make_rng(2);
  const auto x = pcae::gaussian_matrix(16, static_cast<std::size_t>(state.range(0)), rng);
  const std::vector<double> gammas = pcae::init_gammas(16).gammas;
  for (auto _ : state) {
    const auto fw = pcae::forward(m, x);
    const auto l = pcae::pcae_loss(x, fw.z, fw.xhat, {}, gammas, 1.0, pcae::IsoVariant::abs_sq_diff,
                                   pcae::LossTerms{true, true, false});
    benchmark::DoNotOptimize(pcae::backward(m, fw.cache, l.grad_z, l.grad_xhat));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(256)->Arg(1024);

// One epoch over the 70% training split of an 8000-point factor manifold.
void BM_TrainEpoch(benchmark::State& state) {
  const std::vector<double> profile{4, 3, 2, 1};
  const auto ds = pcae::gen_factor_manifold(4, 16, 8000, profile, 1);
  const auto index = pcae::build_index(ds.samples, 10, 1000, 1);
  const auto parts = pcae::split(ds, pcae::SplitSpec{}, 1);
  pcae::TrainConfig cfg;
  cfg.epochs = 1;
  cfg.beta = 1.0;
  cfg.learning_rate = 1e-3;
  for (auto _ : state)
    benchmark::DoNotOptimize(pcae::train(parts.train.samples, parts.train_idx, &index, cfg));
}
BENCHMARK(BM_TrainEpoch)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
