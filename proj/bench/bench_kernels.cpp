// Serial reference vs OpenMP branch of the hot kernels. Each benchmark takes
// the Execution mode as its first argument (0 serial, 1 parallel).

#include <benchmark/benchmark.h>

#include <vector>

#include "snetfdr/harness.hpp"
#include "snetfdr/kernels.hpp"
#include "snetfdr/rng.hpp"

namespace {

using namespace snetfdr;

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_CountLevelSet(benchmark::State& state) {
  std::vector<double> y(static_cast<std::size_t>(state.range(1)));
  Rng rng(1);
  for (double& v : y) v = uniform01(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(count_level_set(y, 0.37, mode(state)));
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_CountLevelSet)->ArgsProduct({{0, 1}, {1 << 16, 1 << 22}});

void BM_TransformBatch(benchmark::State& state) {
  const auto model = ObservationModel::gaussian_mean_shift({0, 0, 0}, {1.5, 1.5, 1.5});
  const auto kind = static_cast<TransformKind>(state.range(1));
  ObservationMatrix x(10000, 3);
  Rng rng(2);
  for (std::size_t i = 0; i < x.rows(); ++i) model.sample_null(rng, x.row(i));
  std::vector<double> out(x.rows());
  for (auto _ : state) {
    transform_batch(model, kind, x, out, 3, 0, mode(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(x.rows()));
}
BENCHMARK(BM_TransformBatch)->ArgsProduct({{0, 1}, {0, 1, 2}});

void BM_TransformBatchMonteCarlo(benchmark::State& state) {
  const auto model = ObservationModel::gaussian_mean_shift({0, 0, 0}, {1.5, 1.5, 1.5}).as_generic();
  ObservationMatrix x(16, 3);
  Rng rng(3);
  for (std::size_t i = 0; i < x.rows(); ++i) model.sample_null(rng, x.row(i));
  std::vector<double> out(x.rows());
  TransformOptions opts;
  opts.mc_samples = 20000;
  opts.execution = mode(state);
  for (auto _ : state) {
    transform_batch(model, TransformKind::chi, x, out, 3, 0, mode(state), opts);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_TransformBatchMonteCarlo)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  auto spec = default_spec(static_cast<ExperimentId>(state.range(1)));
  spec.iterations = 50;
  spec.sweep.resize(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(spec, mode(state)));
  }
}
BENCHMARK(BM_Simulate)
    ->ArgsProduct({{0, 1}, {static_cast<long long>(ExperimentId::E4),
                            static_cast<long long>(ExperimentId::E5)}})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
