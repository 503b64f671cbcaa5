#include "poserefer/fusion.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

using namespace poserefer;

struct Fixture {
  std::vector<std::string> categories;
  std::vector<Sample> samples;
  std::vector<const Sample*> batch;
  EmbeddingStore store{384};

  Fixture(std::size_t batch_size, std::size_t candidates) {
    Rng rng(7);
    for (int c = 0; c < 50; ++c) {
      categories.push_back("cat" + std::to_string(c));
      Vector v(384);
      for (auto& x : v) x = rng.normal();
      store.insert(categories.back(), v.normalized());
    }
    for (std::size_t b = 0; b < batch_size; ++b) {
      Sample s;
      s.pose_features = FeatureMatrix::Zero(static_cast<Index>(candidates), 6);
      for (Index i = 0; i < s.pose_features.size(); ++i) s.pose_features.data()[i] = rng.uniform();
      s.utterance = Vector(384);
      for (auto& x : s.utterance) x = rng.normal();
      for (std::size_t n = 0; n < candidates; ++n) s.category_ids.push_back(static_cast<int>(rng.below(50)));
      s.target = rng.below(candidates);
      samples.push_back(std::move(s));
    }
    for (const auto& s : samples) batch.push_back(&s);
  }
};

void BM_LossAndGrad(benchmark::State& state, const char* preset) {
  Fixture fx(32, static_cast<std::size_t>(state.range(0)));
  FusionModel model(preset_config(preset), fx.categories, &fx.store, 1);
  Rng drop(3);
  for (auto _ : state) benchmark::DoNotOptimize(model.loss_and_grad(fx.batch, &drop));
  state.SetItemsProcessed(state.iterations() * 32);
}

void BM_Score(benchmark::State& state, const char* preset) {
  Fixture fx(1, static_cast<std::size_t>(state.range(0)));
  FusionModel model(preset_config(preset), fx.categories, &fx.store, 1);
  for (auto _ : state) benchmark::DoNotOptimize(model.score(fx.samples.front()));
}

}  // namespace

BENCHMARK_CAPTURE(BM_LossAndGrad, P, "P")->Arg(50);
BENCHMARK_CAPTURE(BM_LossAndGrad, T_minilm, "T_minilm")->Arg(50);
BENCHMARK_CAPTURE(BM_LossAndGrad, PT, "PT")->Arg(50);
BENCHMARK_CAPTURE(BM_LossAndGrad, PT_minilm, "PT_minilm")->Arg(50);
BENCHMARK_CAPTURE(BM_Score, PT_minilm, "PT_minilm")->Arg(42)->Arg(61);

BENCHMARK_MAIN();
