#include <benchmark/benchmark.h>

#include "blstmseg/blstm.hpp"
#include "blstmseg/linalg.hpp"
#include "blstmseg/lstm.hpp"
#include "blstmseg/training.hpp"

using namespace blstmseg;

namespace {

std::vector<Vector> random_sequence(Rng& rng, std::size_t len, std::size_t n) {
  std::vector<Vector> xs(len, Vector(n));
  for (auto& x : xs) fill_uniform(rng, x.span(), 1.0);
  return xs;
}

LstmParams random_lstm(Rng& rng, std::size_t d) {
  auto p = LstmParams::zeros(d, d, false);
  for_each_block(p, [&](std::string_view, std::span<double> b) { fill_uniform(rng, b, 0.1); });
  return p;
}

StackedModel random_model(std::size_t d, std::size_t depth) {
  Vocab vocab;
  for (char32_t c = 0x4E00; c < 0x4E00 + 2000; ++c) vocab.add(c);
  TrainConfig cfg;
  cfg.embed_dim = d;
  cfg.depth = depth;
  Rng rng(1);
  return StackedModel::create(std::move(vocab), cfg, rng);
}

std::u32string random_text(Rng& rng, std::size_t len) {
  std::u32string s;
  for (std::size_t k = 0; k < len; ++k) s.push_back(static_cast<char32_t>(0x4E00 + rng.below(2000)));
  return s;
}

}  // namespace

static void BM_Matvec(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const auto m = init_uniform(rng, n, n, 1.0);
  Vector v(n);
  fill_uniform(rng, v.span(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(matvec(m, v));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_Matvec)->Arg(64)->Arg(200)->Arg(400);

static void BM_LstmForward(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  const auto p = random_lstm(rng, d);
  const auto xs = random_sequence(rng, 50, d);
  for (auto _ : state) benchmark::DoNotOptimize(lstm_forward(p, xs));
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_LstmForward)->Arg(64)->Arg(200);

static void BM_LstmBackward(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  const auto p = random_lstm(rng, d);
  const auto xs = random_sequence(rng, 50, d);
  const auto fwd = lstm_forward(p, xs);
  const auto gs = random_sequence(rng, 50, d);
  for (auto _ : state) benchmark::DoNotOptimize(lstm_backward(p, fwd.tape, gs));
  state.SetItemsProcessed(state.iterations() * 50);
}
BENCHMARK(BM_LstmBackward)->Arg(64)->Arg(200);

static void BM_TrainStep(benchmark::State& state) {
  auto model = random_model(static_cast<std::size_t>(state.range(0)), 1);
  Rng rng(4);
  std::vector<Example> examples;
  for (int k = 0; k < 8; ++k) {
    Example e;
    for (int t = 0; t < 40; ++t) {
      e.ids.push_back(static_cast<std::int32_t>(1 + rng.below(2000)));
      e.tags.push_back(Tag::S);
    }
    examples.push_back(std::move(e));
  }
  const std::vector<std::size_t> idx{0, 1, 2, 3, 4, 5, 6, 7};
  const auto batch = make_batch(examples, idx);
  Trainer trainer(model, model.config);
  for (auto _ : state) benchmark::DoNotOptimize(trainer.step(batch, rng));
  state.SetItemsProcessed(state.iterations() * 8 * 40);
}
BENCHMARK(BM_TrainStep)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_SegmentThroughput(benchmark::State& state) {
  const auto model = random_model(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  Rng rng(5);
  const auto text = random_text(rng, 100);
  for (auto _ : state) benchmark::DoNotOptimize(segment_sentence(model, text));
  state.SetItemsProcessed(state.iterations() * 100);  // characters
}
BENCHMARK(BM_SegmentThroughput)->Args({64, 1})->Args({200, 3})->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
