#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"
#include "sypa/assignment.hpp"
#include "sypa/cleft_detect.hpp"
#include "sypa/evaluation.hpp"
#include "sypa/synthgen.hpp"
#include "sypa/targets.hpp"
#include "sypa/train.hpp"

namespace sypa::cli {

// One trainable network: avan, mask_pruner, prox_pruner, cleft_mask, cleft_prox.
struct RoleSpec {
  NetConfig net;
  TrainSchedule schedule;
};

inline const std::array<std::string, 5> kRoles = {"avan", "mask_pruner", "prox_pruner",
                                                  "cleft_mask", "cleft_prox"};

// Whole-experiment description. A config file may override any subset of
// fields; everything else keeps the defaults below, so `{}` is a valid
// experiment. Relative paths resolve against the config file's directory.
struct ExperimentConfig {
  std::filesystem::path data_dir = "data";
  std::filesystem::path checkpoint_dir = "checkpoints";
  std::filesystem::path report_dir = "reports";

  std::uint64_t seed = 1;
  int worlds = 1;
  GenParams gen;

  std::map<std::string, RoleSpec> roles;  // always holds all five roles
  AssignParams assign;
  DetectParams detect;
  GridSpec grid;
  SignedProximityParams proximity;

  std::string eval_slab = "test";  // train | val | test | heldout | all
};

ExperimentConfig default_config();
ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical full serialization; the basis of the config hash.
nlohmann::json config_to_json(const ExperimentConfig& c);

// FNV-1a 64 over the canonical serialization, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

// Stamp embedded in every report so artifacts trace back to their inputs.
nlohmann::json provenance(const ExperimentConfig& c);

bool known_role(const std::string& role);

// Network shape for a role with the channel counts that role demands.
NetConfig role_net(const ExperimentConfig& c, const std::string& role);
LossKind role_loss(const std::string& role);

std::filesystem::path world_dir(const ExperimentConfig& c, int world);
std::filesystem::path checkpoint_path(const ExperimentConfig& c, const std::string& role);
std::filesystem::path loss_log_path(const ExperimentConfig& c, const std::string& role);

// Resolves an eval_slab name against a volume's z extent ("all" spans it,
// "heldout" is everything past the training slab).
Slab named_slab(const std::string& name, int nz);

}  // namespace sypa::cli
