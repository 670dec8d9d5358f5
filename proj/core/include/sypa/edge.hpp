#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "sypa/volume.hpp"

namespace sypa {

// A connectome edge: one synaptic cleft with its presynaptic and postsynaptic
// segment IDs. Diadic edges have exactly one ID per side; polyadic edges may
// have several. Scores are mean network outputs in [0, 1] where available.
struct SynapseEdge {
  std::uint32_t cleft_id = 0;
  std::vector<std::uint32_t> pre_ids;   // sorted ascending
  std::vector<std::uint32_t> post_ids;  // sorted ascending
  std::map<std::uint32_t, double> pre_scores;
  std::map<std::uint32_t, double> post_scores;
  std::vector<std::string> flags;  // e.g. "pre_tie", "fallback_post", "conflict_resolved"
  Coord patch_center{};
};

inline bool same_partners(const SynapseEdge& a, const SynapseEdge& b) {
  return a.pre_ids == b.pre_ids && a.post_ids == b.post_ids;
}

inline nlohmann::json edge_to_json(const SynapseEdge& e) {
  nlohmann::json pre_scores = nlohmann::json::object();
  for (const auto& [id, s] : e.pre_scores) pre_scores[std::to_string(id)] = s;
  nlohmann::json post_scores = nlohmann::json::object();
  for (const auto& [id, s] : e.post_scores) post_scores[std::to_string(id)] = s;
  return nlohmann::json{
      {"cleft_id", e.cleft_id},
      {"pre_ids", e.pre_ids},
      {"post_ids", e.post_ids},
      {"pre_scores", pre_scores},
      {"post_scores", post_scores},
      {"flags", e.flags},
      {"patch_center", {e.patch_center.z, e.patch_center.y, e.patch_center.x}},
  };
}

inline SynapseEdge edge_from_json(const nlohmann::json& j) {
  SynapseEdge e;
  e.cleft_id = j.at("cleft_id").get<std::uint32_t>();
  e.pre_ids = j.at("pre_ids").get<std::vector<std::uint32_t>>();
  e.post_ids = j.at("post_ids").get<std::vector<std::uint32_t>>();
  if (j.contains("pre_scores"))
    for (const auto& [k, v] : j.at("pre_scores").items())
      e.pre_scores[static_cast<std::uint32_t>(std::stoul(k))] = v.get<double>();
  if (j.contains("post_scores"))
    for (const auto& [k, v] : j.at("post_scores").items())
      e.post_scores[static_cast<std::uint32_t>(std::stoul(k))] = v.get<double>();
  if (j.contains("flags")) e.flags = j.at("flags").get<std::vector<std::string>>();
  if (j.contains("patch_center")) {
    const auto& c = j.at("patch_center");
    e.patch_center = {c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<int>()};
  }
  return e;
}

}  // namespace sypa
