#include <benchmark/benchmark.h>

#include "marc/simulator.hpp"
#include "marc/trainer.hpp"

namespace {

marc::SystemConfig bench_config(int relay_limit, int base_limit) {
  return marc::make_config_db(3, relay_limit, base_limit, 10.0,
                              {-6, -9, -8, -16, -13, -15, 0});
}

void BM_SampleSlot(benchmark::State& state) {
  const marc::SystemConfig cfg = bench_config(1, 1);
  const marc::ChannelSampler sampler(cfg, 1);
  marc::ChannelState slot;
  uint64_t i = 0;
  for (auto _ : state) {
    sampler.sample_into(i++, slot);
    benchmark::DoNotOptimize(slot.snr_relay_base);
  }
}
BENCHMARK(BM_SampleSlot);

void BM_SelectAction(benchmark::State& state) {
  const marc::SystemConfig cfg =
      bench_config(static_cast<int>(state.range(0)),
                   static_cast<int>(state.range(1)));
  const marc::SubsetCatalog catalog = marc::enumerate_subsets(cfg);
  const marc::ChannelSampler sampler(cfg, 1);
  marc::ChannelState slot;
  uint64_t i = 0;
  for (auto _ : state) {
    sampler.sample_into(i++, slot);
    benchmark::DoNotOptimize(
        marc::select_action(slot, catalog, marc::DualVariable{0.5}));
  }
}
BENCHMARK(BM_SelectAction)->Args({1, 1})->Args({2, 3})->Args({3, 4});

void BM_SimulateSlots(benchmark::State& state) {
  const marc::SystemConfig cfg = bench_config(1, 1);
  const marc::SubsetCatalog catalog = marc::enumerate_subsets(cfg);
  const uint64_t slots = static_cast<uint64_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        marc::run_simulation(cfg, catalog, marc::DualVariable{0.5}, slots, 7));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(slots));
}
BENCHMARK(BM_SimulateSlots)->Arg(10000)->Arg(100000);

void BM_GradientBatch(benchmark::State& state) {
  const marc::SystemConfig cfg = bench_config(1, 1);
  const marc::SubsetCatalog catalog = marc::enumerate_subsets(cfg);
  const uint64_t batch = static_cast<uint64_t>(state.range(0));
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(marc::estimate_gradient(
        marc::DualVariable{0.3}, cfg, catalog, batch, ++seed));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(batch));
}
BENCHMARK(BM_GradientBatch)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
