#include "sypa/assignment.hpp"

#include <algorithm>

#include "sypa/error.hpp"
#include "sypa/targets.hpp"

namespace sypa {

std::set<std::uint32_t> candidate_segments(const BinaryVolume& cleft_mask,
                                           const LabelVolume& segmentation,
                                           double radius_nm) {
  if (!same_shape(cleft_mask, segmentation))
    fail("shape mismatch", "cleft mask and segmentation geometry differ");
  const Box box = bounding_box(cleft_mask);
  if (box.empty()) fail("empty cleft", "cleft mask has no foreground");
  const auto offsets = ball_offsets(radius_nm, cleft_mask.resolution);
  std::set<std::uint32_t> out;
  for (int z = box.lo.z; z <= box.hi.z; ++z) {
    for (int y = box.lo.y; y <= box.hi.y; ++y) {
      for (int x = box.lo.x; x <= box.hi.x; ++x) {
        if (!cleft_mask.at(z, y, x)) continue;
        for (const Coord& d : offsets) {
          const int z2 = z + d.z, y2 = y + d.y, x2 = x + d.x;
          if (!segmentation.in_bounds(z2, y2, x2)) continue;
          const std::uint32_t v = segmentation.at(z2, y2, x2);
          if (v != 0) out.insert(v);
        }
      }
    }
  }
  return out;
}

std::map<std::uint32_t, double> score_segments(const ScalarVolume& scores,
                                               const LabelVolume& segmentation_patch,
                                               const std::set<std::uint32_t>& candidates) {
  if (!same_shape(scores, segmentation_patch))
    fail("shape mismatch", "score and segmentation patches differ");
  std::map<std::uint32_t, double> sum;
  std::map<std::uint32_t, std::uint64_t> count;
  for (const std::uint32_t id : candidates) {
    sum[id] = 0.0;
    count[id] = 0;
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const std::uint32_t v = segmentation_patch[i];
    if (v == 0) continue;
    auto it = sum.find(v);
    if (it == sum.end()) continue;
    it->second += static_cast<double>(scores[i]);
    ++count[v];
  }
  std::map<std::uint32_t, double> out;
  for (const std::uint32_t id : candidates)
    out[id] = count[id] == 0 ? 0.0 : sum[id] / static_cast<double>(count[id]);
  return out;
}

BinaryVolume cleft_patch_mask(const LabelVolume& clefts, std::uint32_t cleft_id,
                              const PatchSpec& spec) {
  const Patch<LabelVolume> patch = extract_patch(clefts, spec);
  BinaryVolume mask(spec.shape.z, spec.shape.y, spec.shape.x, clefts.resolution);
  for (std::size_t i = 0; i < patch.data.size(); ++i)
    mask[i] = patch.data[i] == cleft_id ? 1 : 0;
  return mask;
}

Tensor<float> avan_input(const ScalarVolume& image_patch, const BinaryVolume& cleft_patch) {
  if (!same_shape(image_patch, cleft_patch))
    fail("shape mismatch", "image and cleft patches differ");
  Tensor<float> input(2, image_patch.nz, image_patch.ny, image_patch.nx);
  const std::size_t n = image_patch.size();
  for (std::size_t i = 0; i < n; ++i) {
    input.data[i] = image_patch[i];
    input.data[n + i] = cleft_patch[i] ? 1.0f : 0.0f;
  }
  return input;
}

PartnerScores NetPartnerPredictor::do_predict(const ScalarVolume& image_patch,
                                              const BinaryVolume& cleft_patch,
                                              std::uint32_t /*cleft_id*/,
                                              const Coord& /*patch_offset*/) {
  const Tensor<float> input = avan_input(image_patch, cleft_patch);
  const Tensor<float>& logits = net_->forward(input);
  if (logits.c != 2) fail("shape mismatch", "partner network must emit two channels");
  PartnerScores s;
  s.pre = ScalarVolume(logits.z, logits.y, logits.x, image_patch.resolution);
  s.post = ScalarVolume(logits.z, logits.y, logits.x, image_patch.resolution);
  const std::size_t n = s.pre.size();
  for (std::size_t i = 0; i < n; ++i) {
    s.pre[i] = static_cast<float>(sigmoid(static_cast<double>(logits.data[i])));
    s.post[i] = static_cast<float>(sigmoid(static_cast<double>(logits.data[n + i])));
  }
  return s;
}

PartnerScores OraclePartnerPredictor::do_predict(const ScalarVolume& image_patch,
                                                 const BinaryVolume& /*cleft_patch*/,
                                                 std::uint32_t cleft_id,
                                                 const Coord& patch_offset) {
  PatchSpec spec;
  spec.shape = Coord{image_patch.nz, image_patch.ny, image_patch.nx};
  spec.center = Coord{patch_offset.z + spec.shape.z / 2, patch_offset.y + spec.shape.y / 2,
                      patch_offset.x + spec.shape.x / 2};
  const PartnerMasks masks = partner_mask_targets(*world_, cleft_id, spec);
  PartnerScores s;
  s.pre = ScalarVolume(spec.shape.z, spec.shape.y, spec.shape.x, image_patch.resolution);
  s.post = ScalarVolume(spec.shape.z, spec.shape.y, spec.shape.x, image_patch.resolution);
  for (std::size_t i = 0; i < s.pre.size(); ++i) {
    s.pre[i] = masks.pre[i] ? 1.0f : 0.0f;
    s.post[i] = masks.post[i] ? 1.0f : 0.0f;
  }
  return s;
}

namespace {

struct ScoredSides {
  std::map<std::uint32_t, double> pre, post;
  Coord center;
};

// Shared front half of both assignment modes: window, forward, scoring.
ScoredSides score_cleft(PartnerPredictor& predictor, const ScalarVolume& image,
                        const LabelVolume& segmentation, const LabelVolume& clefts,
                        std::uint32_t cleft_id, const AssignParams& params) {
  const BinaryVolume mask = mask_of(clefts, cleft_id);
  const Coord center = centroid_of_mask(mask);  // "empty cleft" when absent

  PatchSpec spec = params.patch;
  spec.center = center;
  const Patch<ScalarVolume> image_patch = extract_patch(image, spec);
  const BinaryVolume cleft_patch = cleft_patch_mask(clefts, cleft_id, spec);

  const std::set<std::uint32_t> candidates =
      candidate_segments(mask, segmentation, params.dilation_radius_nm);
  if (candidates.empty())
    fail("no candidates", "no segment overlaps the dilated cleft; increase the radius");

  const PartnerScores scores =
      predictor.predict(image_patch.data, cleft_patch, cleft_id, image_patch.offset);
  const Patch<LabelVolume> seg_patch = extract_patch(segmentation, spec);

  ScoredSides out;
  out.center = center;
  out.pre = score_segments(scores.pre, seg_patch.data, candidates);
  out.post = score_segments(scores.post, seg_patch.data, candidates);
  return out;
}

// Smallest-ID argmax over a score map; sets tied when several reach the max.
std::uint32_t argmax_id(const std::map<std::uint32_t, double>& scores, bool& tied) {
  std::uint32_t best = 0;
  double best_score = 0.0;
  bool first = true;
  int at_max = 0;
  for (const auto& [id, s] : scores) {
    if (first || s > best_score) {
      best = id;
      best_score = s;
      at_max = 1;
      first = false;
    } else if (s == best_score) {
      ++at_max;
    }
  }
  tied = at_max > 1;
  return best;
}

}  // namespace

SynapseEdge assign_partners(PartnerPredictor& predictor, const ScalarVolume& image,
                            const LabelVolume& segmentation, const LabelVolume& clefts,
                            std::uint32_t cleft_id, const AssignParams& params) {
  const ScoredSides sides =
      score_cleft(predictor, image, segmentation, clefts, cleft_id, params);

  SynapseEdge edge;
  edge.cleft_id = cleft_id;
  edge.patch_center = sides.center;
  edge.pre_scores = sides.pre;
  edge.post_scores = sides.post;

  bool pre_tie = false, post_tie = false;
  std::uint32_t pre = argmax_id(sides.pre, pre_tie);
  std::uint32_t post = argmax_id(sides.post, post_tie);
  if (pre_tie) edge.flags.push_back("pre_tie");
  if (post_tie) edge.flags.push_back("post_tie");

  if (pre == post) {
    // Diadic edges need distinct sides: take the best non-conflicting pair.
    if (sides.pre.size() < 2)
      fail("no candidates", "cannot form a diadic edge from a single candidate");
    double best_sum = 0.0;
    bool found = false;
    for (const auto& [a, sa] : sides.pre) {
      for (const auto& [b, sb] : sides.post) {
        if (a == b) continue;
        if (!found || sa + sb > best_sum) {
          pre = a;
          post = b;
          best_sum = sa + sb;
          found = true;
        }
      }
    }
    edge.flags.push_back("conflict_resolved");
  }

  edge.pre_ids = {pre};
  edge.post_ids = {post};
  return edge;
}

SynapseEdge assign_partners_polyadic(PartnerPredictor& predictor, const ScalarVolume& image,
                                     const LabelVolume& segmentation,
                                     const LabelVolume& clefts, std::uint32_t cleft_id,
                                     const AssignParams& params) {
  if (!params.polyadic_tau.has_value() || !(*params.polyadic_tau > 0.0) ||
      !(*params.polyadic_tau < 1.0))
    fail("bad params", "polyadic threshold must lie strictly inside (0, 1)");
  const double tau = *params.polyadic_tau;
  const ScoredSides sides =
      score_cleft(predictor, image, segmentation, clefts, cleft_id, params);

  SynapseEdge edge;
  edge.cleft_id = cleft_id;
  edge.patch_center = sides.center;
  edge.pre_scores = sides.pre;
  edge.post_scores = sides.post;

  auto select = [&edge, tau](const std::map<std::uint32_t, double>& scores,
                             const char* fallback_flag) {
    std::vector<std::uint32_t> ids;
    for (const auto& [id, s] : scores)
      if (s > tau) ids.push_back(id);
    if (ids.empty()) {
      bool tied = false;
      ids.push_back(argmax_id(scores, tied));
      edge.flags.push_back(fallback_flag);
    }
    return ids;  // map iteration is ascending, so already sorted
  };
  edge.pre_ids = select(sides.pre, "fallback_pre");
  edge.post_ids = select(sides.post, "fallback_post");
  return edge;
}

}  // namespace sypa
