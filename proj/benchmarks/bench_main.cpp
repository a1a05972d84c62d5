#include <benchmark/benchmark.h>

#include "sbrnn/channel.hpp"
#include "sbrnn/estimator.hpp"
#include "sbrnn/mlsd.hpp"
#include "sbrnn/trainer.hpp"

using namespace sbrnn;

namespace {

NuTable filled_table(int order, int memory) {
  NuTable t(order, memory, 2);
  Rng rng(1);
  for (auto& m : t.means) m = static_cast<double>(rng() % 1000) / 1000.0;
  for (auto& c : t.counts) c = 1;
  return t;
}

}  // namespace

// Viterbi over one 1024-symbol frame; argument is mu (PAM2).
static void BM_Viterbi(benchmark::State& state) {
  const int mu = static_cast<int>(state.range(0));
  const auto table = filled_table(2, mu);
  std::vector<double> y(2048);
  Rng rng(2);
  for (auto& v : y) v = static_cast<double>(rng() % 1000) / 1000.0;
  const std::vector<int> pre(static_cast<std::size_t>(mu / 2), 0), post(static_cast<std::size_t>(mu / 2), 1);
  for (auto _ : state) benchmark::DoNotOptimize(viterbi_detect(y, table, pre, post));
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_Viterbi)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

// Sliding-window receiver over 1000 blocks; argument is W.
static void BM_SlidingReceiver(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  const auto params = TransceiverParams::glorot({64, 48}, 3);
  const Matrix blocks = Matrix::Random(48, 1000 + w - 1);
  for (auto _ : state) benchmark::DoNotOptimize(slide(params.rx, blocks, w, uniform_weights(w)));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SlidingReceiver)->Arg(2)->Arg(10)->Unit(benchmark::kMillisecond);

// Channel forward pass on 48k samples at 80 km.
static void BM_ChannelForward(benchmark::State& state) {
  ChannelConfig c;
  c.distance_km = 80;
  const Channel ch(c);
  std::vector<double> tx(48000, 0.4);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(ch.forward(tx, ++seed));
  state.SetItemsProcessed(state.iterations() * 48000);
}
BENCHMARK(BM_ChannelForward)->Unit(benchmark::kMillisecond);

// One full training step at reference size with Z sequences.
static void BM_TrainStep(benchmark::State& state) {
  ChannelConfig c;
  c.distance_km = 40;
  const Channel ch(c);
  auto params = TransceiverParams::glorot({64, 48}, 4);
  const int z = static_cast<int>(state.range(0));
  Batch batch;
  for (int i = 0; i < z; ++i) batch.messages.push_back(generate_messages(10, 64, RngFamily::mersenne_twister, 5 + i));
  Adam opt;
  auto states = CarriedStates::zeros(params.dims, z);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(train_step(params, batch, ch, opt, states, ++seed));
}
BENCHMARK(BM_TrainStep)->Arg(50)->Arg(250)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
