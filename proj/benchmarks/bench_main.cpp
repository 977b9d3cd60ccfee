#include <benchmark/benchmark.h>

#include <vector>

#include "earshot/fft.hpp"
#include "earshot/metrics.hpp"
#include "earshot/renderer.hpp"
#include "earshot/scene.hpp"
#include "earshot/source_provider.hpp"
#include "earshot/spatializer.hpp"

namespace {

using namespace earshot;

constexpr int kFs = 16000;

SourcePose side_pose() {
  SceneEvent e;
  e.azimuth = 60.0;
  e.elevation = 15.0;
  e.distance = 2.0;
  return event_pose(e);
}

void BM_Fft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  RealFft fft(n);
  std::vector<double> x(n, 0.25);
  std::vector<Complex> X(fft.bins());
  for (auto _ : state) {
    fft.forward(x, X);
    benchmark::DoNotOptimize(X.data());
  }
}
BENCHMARK(BM_Fft)->Arg(1024)->Arg(2048)->Arg(4096);

void BM_WolaRoundtrip(benchmark::State& state) {
  const auto clip = synth_test_signal(SignalKind::kNoise, static_cast<double>(state.range(0)), kFs, 1);
  for (auto _ : state) benchmark::DoNotOptimize(wola_roundtrip(clip, FramePlan{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(clip.samples.size()));
}
BENCHMARK(BM_WolaRoundtrip)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_RenderEvent(benchmark::State& state) {
  const auto clip = synth_test_signal(SignalKind::kNoise, static_cast<double>(state.range(0)), kFs, 2);
  const FramePlan plan;
  for (auto _ : state) {
    const auto field = parametric_field(side_pose(), plan.frame_count(clip.samples.size()), plan.fft_size, kFs);
    benchmark::DoNotOptimize(render_event(clip, field, plan.with_pad_for(field)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(clip.samples.size()));
}
BENCHMARK(BM_RenderEvent)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_EvalPair(benchmark::State& state) {
  const auto clip = synth_test_signal(SignalKind::kNoise, 2.0, kFs, 3);
  const FramePlan plan;
  const auto field = parametric_field(side_pose(), plan.frame_count(clip.samples.size()), plan.fft_size, kFs);
  auto a = render_event(clip, field, plan.with_pad_for(field));
  auto b = a;
  for (auto& v : b.left) v *= 0.9;
  for (auto _ : state) benchmark::DoNotOptimize(eval_pair(a, b));
}
BENCHMARK(BM_EvalPair)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
