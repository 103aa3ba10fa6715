// Serial reference kernels against the OpenMP versions.
// Thread-count argument 0 selects the serial reference.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "rsvr/simulator.hpp"
#include "rsvr/synthesis.hpp"
#include "rsvr/warp.hpp"

namespace {

using namespace rsvr;

struct Inputs {
  ImageBuffer image;
  FlowField flow;
  ScalarMap importance;
};

Inputs make_inputs(int size) {
  std::mt19937 rng(99);
  std::uniform_real_distribution<float> value(0.0f, 1.0f);
  std::uniform_real_distribution<float> motion(-12.0f, 12.0f);
  std::vector<float> pixels(static_cast<std::size_t>(size) * size * 3);
  for (float& v : pixels) v = value(rng);
  Inputs in{ImageBuffer(size, size, 3, std::move(pixels)), FlowField(size, size), ScalarMap(size, size)};
  for (FlowVector& f : in.flow.data()) f = {motion(rng), motion(rng)};
  for (float& z : in.importance.data()) z = -10.0f * value(rng);
  return in;
}

void set_threads(benchmark::State& state) {
  state.counters["threads"] = static_cast<double>(state.range(1));
  if (state.range(1) > 0) omp_set_num_threads(static_cast<int>(state.range(1)));
}

void BM_ForwardSplat(benchmark::State& state) {
  const Inputs in = make_inputs(static_cast<int>(state.range(0)));
  const SplatConfig cfg{SplatMode::softmax};
  set_threads(state);
  for (auto _ : state) {
    SplatResult r = state.range(1) == 0 ? reference::forward_splat(in.image, in.flow, in.importance, cfg)
                                        : forward_splat(in.image, in.flow, in.importance, cfg);
    benchmark::DoNotOptimize(r.image.data().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_BackwardWarp(benchmark::State& state) {
  const Inputs in = make_inputs(static_cast<int>(state.range(0)));
  set_threads(state);
  for (auto _ : state) {
    ImageBuffer r = state.range(1) == 0 ? reference::backward_warp(in.image, in.flow) : backward_warp(in.image, in.flow);
    benchmark::DoNotOptimize(r.data().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_Reconstruct(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  SceneSpec scene;
  scene.width = size;
  scene.height = size;
  scene.texture.kind = TextureKind::value_noise;
  scene.texture.seed = 7;
  scene.texture.scale = 16.0;
  scene.motion.background = {40.0, 0.0};
  const ShutterSpec spec(size, 1.0);
  const ImageBuffer rs0 = render_rs(scene, spec, Frame::first);
  const ImageBuffer rs1 = render_rs(scene, spec, Frame::second);
  const FlowField f01 = gt_flow(scene, spec, Frame::first);
  const FlowField f10 = gt_flow(scene, spec, Frame::second);
  omp_set_num_threads(static_cast<int>(state.range(1)));
  state.counters["threads"] = static_cast<double>(state.range(1));
  for (auto _ : state) {
    ReconstructionResult r = reconstruct(rs0, rs1, f01, f10, 0.5, spec, {});
    benchmark::DoNotOptimize(r.frame.data().data());
  }
}

void kernel_args(benchmark::internal::Benchmark* b) {
  for (int size : {256, 1024}) {
    for (int threads : {0, 1, 2, 4, 8}) b->Args({size, threads});
  }
  b->ArgNames({"size", "threads"})->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_ForwardSplat)->Apply(kernel_args);
BENCHMARK(BM_BackwardWarp)->Apply(kernel_args);
BENCHMARK(BM_Reconstruct)
    ->ArgsProduct({{256, 512}, {1, 4, 8}})
    ->ArgNames({"size", "threads"})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
