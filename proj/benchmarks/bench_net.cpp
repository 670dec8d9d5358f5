// Network throughput on the shapes the pipeline actually runs: dense forward
// passes over one attention window and full optimization steps.
#include <benchmark/benchmark.h>

#include <utility>

#include "sypa/net.hpp"
#include "sypa/rng.hpp"
#include "sypa/train.hpp"

using namespace sypa;

namespace {

Tensor<float> random_input(int c, int z, int y, int x, std::uint64_t seed) {
  Tensor<float> t(c, z, y, x);
  Rng rng(seed);
  for (float& v : t.data) v = static_cast<float>(rng.real());
  return t;
}

UNet<float> make_net(int in, int out, int width) {
  NetConfig cfg;
  cfg.in_channels = in;
  cfg.out_channels = out;
  cfg.width = width;
  cfg.depth = 2;
  cfg.seed = 1;
  return build_network<float>(cfg);
}

class FixedSampler : public ExampleSampler {
 public:
  explicit FixedSampler(TrainingExample ex) : ex_(std::move(ex)) {}
  TrainingExample next(Rng&) override { return ex_; }

 private:
  TrainingExample ex_;
};

}  // namespace

static void BM_ForwardAssociation(benchmark::State& state) {
  UNet<float> net = make_net(2, 2, static_cast<int>(state.range(0)));
  const Tensor<float> input = random_input(2, 18, 80, 80, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward(input).data.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ForwardAssociation)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_ForwardPairClassifier(benchmark::State& state) {
  UNet<float> net = make_net(4, 1, 8);
  const Tensor<float> input = random_input(4, 18, 80, 80, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward(input).data.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ForwardPairClassifier)->Unit(benchmark::kMillisecond);

static void BM_TrainIteration(benchmark::State& state) {
  UNet<float> net = make_net(2, 2, 8);
  TrainingExample ex;
  ex.input = random_input(2, 18, 80, 80, 4);
  ex.target = Tensor<float>(2, 18, 80, 80);
  Rng fill(5);
  for (float& v : ex.target.data) v = fill.real() < 0.1 ? 1.0f : 0.0f;
  FixedSampler sampler(std::move(ex));

  TrainSchedule sched;
  sched.iterations = 1;
  sched.batch = 1;
  sched.log_every = 1;
  AdamState adam;
  Rng rng(9);
  std::int64_t start = 0;
  for (auto _ : state) {
    const TrainResult r =
        train(net, sampler, sched, LossKind::dense_bce, adam, rng, start);
    benchmark::DoNotOptimize(r.log.data());
    ++start;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_TrainIteration)->Unit(benchmark::kMillisecond);
