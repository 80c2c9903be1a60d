// Parallel kernels against their serial references on a full-size network.
// Run with OMP_NUM_THREADS set to compare thread counts.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "nib/kernels.hpp"
#include "nib/learning.hpp"
#include "nib/network.hpp"

namespace {

struct Fixture {
  nib::Network net;
  std::vector<std::uint8_t> alpha, beta;
  std::vector<nib::kernels::DeltaEntry> delta;

  Fixture(std::size_t hidden, double firing_fraction) {
    nib::NetworkConfig cfg;
    cfg.n_hidden = hidden;
    cfg.seed = 1;
    net = nib::build_topology(cfg);
    std::mt19937_64 eng(7);
    std::bernoulli_distribution fire(firing_fraction);
    alpha.resize(net.size());
    beta.resize(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
      alpha[i] = fire(eng);
      beta[i] = fire(eng);
    }
    delta = nib::kernels::stdp_delta(alpha, beta);
  }
};

const Fixture& fixture(std::size_t hidden) {
  static Fixture small(200, 0.2), full(600, 0.2), large(1400, 0.2);
  return hidden <= 200 ? small : hidden <= 600 ? full : large;
}

void args(benchmark::internal::Benchmark* b) { b->Arg(200)->Arg(600)->Arg(1400); }

void BM_Propagate(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  std::vector<double> drive(f.net.size());
  for (auto _ : state) {
    nib::kernels::propagate(f.net.connections, f.alpha, drive);
    benchmark::DoNotOptimize(drive.data());
  }
  state.SetLabel("n=" + std::to_string(f.net.size()));
}

void BM_PropagateReference(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  std::vector<double> drive(f.net.size());
  for (auto _ : state) {
    nib::kernels::reference::propagate(f.net.connections, f.alpha, drive);
    benchmark::DoNotOptimize(drive.data());
  }
}

void BM_StdpDelta(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nib::kernels::stdp_delta(f.alpha, f.beta));
  state.counters["entries"] = double(f.delta.size());
}

void BM_StdpDeltaReference(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nib::kernels::reference::stdp_delta(f.alpha, f.beta));
}

void BM_ApplyDelta(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  nib::Matrix c = f.net.connections, a = f.net.change;
  for (auto _ : state) {
    // Alternating signs keep the weights away from the clip bounds.
    benchmark::DoNotOptimize(nib::kernels::apply_delta(f.delta, 1e-3, 4.0, c, f.net.plasticity, a));
    benchmark::DoNotOptimize(nib::kernels::apply_delta(f.delta, -1e-3, 4.0, c, f.net.plasticity, a));
  }
}

void BM_ApplyDeltaReference(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  nib::Matrix c = f.net.connections, a = f.net.change;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nib::kernels::reference::apply_delta(f.delta, 1e-3, 4.0, c, f.net.plasticity, a));
    benchmark::DoNotOptimize(nib::kernels::reference::apply_delta(f.delta, -1e-3, 4.0, c, f.net.plasticity, a));
  }
}

void BM_NoveltySum(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(nib::kernels::novelty_sum(f.delta, f.net.connections, f.net.plasticity));
}

void BM_NetworkStep(benchmark::State& state) {
  nib::NetworkConfig cfg;
  cfg.n_hidden = state.range(0);
  cfg.seed = 2;
  auto net = nib::build_topology(cfg);
  std::vector<double> input(cfg.n_input, 0.0);
  for (std::size_t k = 0; k < input.size(); k += 3) input[k] = 1.0;
  for (auto _ : state) {
    net.step(input);
    nib::stdp_update(net, 1e-3, 1.0);
  }
}

}  // namespace

BENCHMARK(BM_Propagate)->Apply(args);
BENCHMARK(BM_PropagateReference)->Apply(args);
BENCHMARK(BM_StdpDelta)->Apply(args);
BENCHMARK(BM_StdpDeltaReference)->Apply(args);
BENCHMARK(BM_ApplyDelta)->Apply(args);
BENCHMARK(BM_ApplyDeltaReference)->Apply(args);
BENCHMARK(BM_NoveltySum)->Apply(args);
BENCHMARK(BM_NetworkStep)->Apply(args);

BENCHMARK_MAIN();
