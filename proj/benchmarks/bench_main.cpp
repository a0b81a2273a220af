#include <benchmark/benchmark.h>

#include "bpinn/jet.hpp"
#include "bpinn/loss.hpp"
#include "bpinn/training.hpp"

namespace {

using namespace bpinn;

void BM_EvaluateJet(benchmark::State& state) {
  const auto arch = MLPArchitecture::parse("2-32-32-4");
  const auto params = init_parameters(arch, 1);
  double x = -0.9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_jet(arch, params, {x, 0.3}));
    x = x > 0.9 ? -0.9 : x + 1e-3;
  }
}
BENCHMARK(BM_EvaluateJet);

// Loss and gradient on ladder level `range(0)` for the default network.
void BM_LossGradient(benchmark::State& state) {
  const auto arch = MLPArchitecture::parse("2-32-32-4");
  const auto params = init_parameters(arch, 1);
  const auto data = hierarchical_datasets(static_cast<int>(state.range(0)) + 1, DomainSpec{}, 2023).back();
  const LossProblem problem(data, FlowParameters{});
  LossEngine engine(arch, problem);
  std::vector<double> grad(params.size());
  for (auto _ : state) benchmark::DoNotOptimize(engine.evaluate(params.values(), grad));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_LossGradient)->Arg(3)->Arg(5)->Arg(7)->Unit(benchmark::kMicrosecond);

void BM_TrainingEpochs(benchmark::State& state) {
  const auto arch = MLPArchitecture::parse("2-32-32-4");
  const auto data = hierarchical_datasets(6, DomainSpec{}, 2023).back();
  TrainConfig c;
  c.optimizer = state.range(0) == 0 ? OptimizerKind::Adam : OptimizerKind::Lbfgs;
  c.threshold = 0.0;
  c.max_epochs = 100;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        train(arch, init_parameters(arch, 1), data, FlowParameters{}, beltrami_forcing_provider(), c));
  }
}
BENCHMARK(BM_TrainingEpochs)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
