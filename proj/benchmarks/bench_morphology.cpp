// Voxel morphology on realistic label geometry: physical-radius dilation and
// connected-component extraction over a generated world's cleft mask.
#include <benchmark/benchmark.h>

#include "sypa/synthgen.hpp"
#include "sypa/targets.hpp"
#include "sypa/volume.hpp"

using namespace sypa;

namespace {

const SyntheticWorld& bench_world() {
  static const SyntheticWorld world = [] {
    GenParams p;
    p.shape = Coord{32, 128, 128};
    p.neurite_count = 18;
    p.synapse_count = 30;
    p.seed = 99;
    return generate_world(p);
  }();
  return world;
}

}  // namespace

static void BM_DilateCleftMask(benchmark::State& state) {
  const BinaryVolume mask = cleft_mask_target(bench_world());
  const double radius = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dilate(mask, radius).data.data());
  }
}
BENCHMARK(BM_DilateCleftMask)->Arg(24)->Arg(36)->Arg(48)->Unit(benchmark::kMillisecond);

static void BM_ConnectedComponents(benchmark::State& state) {
  // Neurite voxels form one large foreground with many components.
  const SyntheticWorld& world = bench_world();
  BinaryVolume fg(world.segmentation.nz, world.segmentation.ny, world.segmentation.nx,
                  world.segmentation.resolution);
  for (std::size_t i = 0; i < fg.size(); ++i) fg[i] = world.segmentation[i] != 0;
  const Connectivity conn =
      state.range(0) == 6 ? Connectivity::six : Connectivity::twenty_six;
  for (auto _ : state) {
    benchmark::DoNotOptimize(connected_components(fg, conn).data.data());
  }
}
BENCHMARK(BM_ConnectedComponents)->Arg(6)->Arg(26)->Unit(benchmark::kMillisecond);

static void BM_SignedProximityField(benchmark::State& state) {
  const SyntheticWorld& world = bench_world();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        signed_proximity_target(world, SignedProximityParams{150.0}).data.data());
  }
}
BENCHMARK(BM_SignedProximityField)->Unit(benchmark::kMillisecond);
