#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "sypa/net.hpp"
#include "sypa/train.hpp"

namespace sypa {

// Everything needed to resume or reuse a training run, alongside the weights.
struct CheckpointMeta {
  NetConfig config;
  TrainSchedule schedule;
  std::string role;  // avan, mask_pruner, prox_pruner, cleft_mask, cleft_prox
  std::int64_t iteration = 0;
  AdamState adam;
  std::array<std::uint64_t, 4> rng_state{};
  bool has_rng_state = false;
};

// Single self-describing file: one JSON header line, then little-endian f32
// data (weights, then both Adam moments) for each parameter block in order.
void save_checkpoint(const std::filesystem::path& path, UNet<float>& net,
                     const CheckpointMeta& meta);

// Rebuilds the network from the stored config and fills its parameters.
CheckpointMeta load_checkpoint(const std::filesystem::path& path, UNet<float>& net);

}  // namespace sypa
