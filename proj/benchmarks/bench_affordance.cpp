#include "poserefer/affordance.hpp"
#include "poserefer/synth.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace poserefer;

void BM_ReferenceFeatures(benchmark::State& state) {
  SynthConfig cfg;
  cfg.n_refs = 20;
  const SynthOutput data = gen_dataset(cfg);
  const ReferenceEvent& e = data.dataset.events.front();
  const PoseTrack& track = data.dataset.track_for(e);
  const Scene& scene = data.dataset.scene_for(e);
  for (auto _ : state) benchmark::DoNotOptimize(reference_features(e, track, scene));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(scene.objects.size()));
}

void BM_ChannelAngle(benchmark::State& state) {
  const Vec3 d(1.0, 0.2, -0.1);
  const Vec3 o(0.1, 0.2, 1.4);
  Vec3 c(3.0, 1.0, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(channel_angle(d, o, c));
    c.x() += 1e-9;
  }
}

}  // namespace

BENCHMARK(BM_ReferenceFeatures);
BENCHMARK(BM_ChannelAngle);

BENCHMARK_MAIN();
