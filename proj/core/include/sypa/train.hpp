#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sypa/net.hpp"
#include "sypa/rng.hpp"
#include "sypa/tensor.hpp"
#include "sypa/volume.hpp"

namespace sypa {

// Manual piecewise-constant learning-rate schedule: lr at iteration i is the
// value of the last breakpoint with iteration <= i.
struct TrainSchedule {
  std::int64_t iterations = 0;
  int batch = 1;
  std::vector<std::pair<std::int64_t, double>> lr_schedule{{0, 1e-3}};
  std::int64_t log_every = 10;
  std::uint64_t seed = 1;
};

void to_json(nlohmann::json& j, const TrainSchedule& s);
void from_json(const nlohmann::json& j, TrainSchedule& s);

void validate_schedule(const TrainSchedule& s);
double lr_at(const TrainSchedule& s, std::int64_t iteration);

// How the target tensor is scored against the network output.
enum class LossKind {
  dense_bce,   // per-voxel BCE on sigmoid outputs (binary mask targets)
  pooled_bce,  // global-average-pool logit + sigmoid; target is 1x1x1x1 label
  signed_bce,  // tanh head against targets in [-1, 1]
};

struct TrainingExample {
  Tensor<float> input;
  Tensor<float> target;
  std::uint32_t cleft_id = 0;  // provenance
  Coord center{0, 0, 0};
};

class ExampleSampler {
 public:
  virtual ~ExampleSampler() = default;
  virtual TrainingExample next(Rng& rng) = 0;
};

struct LossLogRow {
  std::int64_t iteration = 0;
  double loss = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  std::vector<LossLogRow> log;
  std::int64_t iterations_run = 0;
};

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t t = 0;  // completed optimizer steps
};

// Runs schedule.iterations optimizer steps, each accumulating gradients over
// schedule.batch sampled examples. Iteration indices in the log continue from
// start_iteration so resumed runs concatenate cleanly. Aborts on non-finite
// loss. Deterministic given the rng state.
TrainResult train(UNet<float>& net, ExampleSampler& sampler, const TrainSchedule& schedule,
                  LossKind kind, AdamState& adam, Rng& rng,
                  std::int64_t start_iteration = 0);

// Loss-log CSV: header "iteration,loss,lr", one row per logged step.
void write_loss_log(const std::filesystem::path& path, const std::vector<LossLogRow>& rows,
                    bool append);
std::vector<LossLogRow> read_loss_log(const std::filesystem::path& path);

}  // namespace sypa
