// End-to-end stage costs: world synthesis, rendering, and the per-cleft price
// of windowed assignment versus exhaustive pair scoring.
#include <benchmark/benchmark.h>

#include "sypa/assignment.hpp"
#include "sypa/combined.hpp"
#include "sypa/pruners.hpp"
#include "sypa/synthgen.hpp"

using namespace sypa;

namespace {

GenParams bench_params() {
  GenParams p;
  p.shape = Coord{32, 128, 128};
  p.neurite_count = 18;
  p.synapse_count = 30;
  p.seed = 99;
  return p;
}

const WorldBundle& bench_bundle() {
  static const WorldBundle bundle = [] {
    const GenParams p = bench_params();
    WorldBundle b;
    b.world = generate_world(p);
    b.image = render_image(b.world, p);
    return b;
  }();
  return bundle;
}

}  // namespace

static void BM_GenerateWorld(benchmark::State& state) {
  GenParams p = bench_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_world(p).segmentation.data.data());
    ++p.seed;  // fresh geometry each round
  }
}
BENCHMARK(BM_GenerateWorld)->Unit(benchmark::kMillisecond);

static void BM_RenderImage(benchmark::State& state) {
  const GenParams p = bench_params();
  const SyntheticWorld world = generate_world(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_image(world, p).data.data());
  }
}
BENCHMARK(BM_RenderImage)->Unit(benchmark::kMillisecond);

// One windowed prediction per cleft, whatever the candidate count.
static void BM_AssignWindowed(benchmark::State& state) {
  const WorldBundle& b = bench_bundle();
  OraclePartnerPredictor oracle(b.world);
  AssignParams params;
  std::size_t i = 0;
  for (auto _ : state) {
    const SynapseEdge& truth = b.world.true_edges[i % b.world.true_edges.size()];
    benchmark::DoNotOptimize(assign_partners(oracle, b.image, b.world.segmentation,
                                             b.world.cleft_labels, truth.cleft_id, params)
                                 .pre_ids.data());
    ++i;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AssignWindowed)->Unit(benchmark::kMillisecond);

// The pair protocol pays k(k-1) scorer calls per cleft before any network
// cost; this measures the surrounding machinery with a free scorer.
static void BM_AssignPairProtocol(benchmark::State& state) {
  const WorldBundle& b = bench_bundle();
  OraclePairScorer oracle(b.world);
  AssignParams params;
  PrunerContext ctx;
  std::size_t i = 0;
  for (auto _ : state) {
    const SynapseEdge& truth = b.world.true_edges[i % b.world.true_edges.size()];
    benchmark::DoNotOptimize(assign_by_pruner(oracle, b.image, b.world.segmentation,
                                              b.world.cleft_labels, truth.cleft_id, params,
                                              ctx)
                                 .pre_ids.data());
    ++i;
  }
  state.SetItemsProcessed(state.iterations());
  state.counters["scorer_calls_per_item"] =
      benchmark::Counter(static_cast<double>(oracle.calls()) /
                         static_cast<double>(state.iterations()));
}
BENCHMARK(BM_AssignPairProtocol)->Unit(benchmark::kMillisecond);
