#include "sypa/pruners.hpp"

#include <algorithm>

#include "sypa/error.hpp"

namespace sypa {

std::vector<CandidatePair> candidate_pairs(const BinaryVolume& cleft_mask,
                                           const LabelVolume& segmentation,
                                           double radius_nm, std::uint32_t cleft_id,
                                           const SynapseEdge* truth, bool* warning) {
  const std::set<std::uint32_t> candidates =
      candidate_segments(cleft_mask, segmentation, radius_nm);
  if (warning != nullptr) *warning = candidates.size() < 2;
  std::vector<CandidatePair> pairs;
  if (candidates.size() < 2) return pairs;
  for (const std::uint32_t a : candidates) {
    for (const std::uint32_t b : candidates) {
      if (a == b) continue;
      CandidatePair p;
      p.cleft_id = cleft_id;
      p.pre = a;
      p.post = b;
      if (truth != nullptr) {
        const bool pre_ok = std::find(truth->pre_ids.begin(), truth->pre_ids.end(), a) !=
                            truth->pre_ids.end();
        const bool post_ok = std::find(truth->post_ids.begin(), truth->post_ids.end(), b) !=
                             truth->post_ids.end();
        p.positive = pre_ok && post_ok;
      }
      pairs.push_back(p);
    }
  }
  return pairs;
}

Tensor<float> pruner_input(const ScalarVolume& image_patch, const ScalarVolume& repr_patch,
                           const BinaryVolume& pre_mask, const BinaryVolume& post_mask) {
  if (!same_shape(image_patch, repr_patch) || !same_shape(image_patch, pre_mask) ||
      !same_shape(image_patch, post_mask))
    fail("shape mismatch", "pruner input channels have differing geometry");
  Tensor<float> input(4, image_patch.nz, image_patch.ny, image_patch.nx);
  const std::size_t n = image_patch.size();
  for (std::size_t i = 0; i < n; ++i) {
    input.data[i] = image_patch[i];
    input.data[n + i] = repr_patch[i];
    input.data[2 * n + i] = pre_mask[i] ? 1.0f : 0.0f;
    input.data[3 * n + i] = post_mask[i] ? 1.0f : 0.0f;
  }
  return input;
}

namespace {

double pooled_probability(UNet<float>& net, const Tensor<float>& input) {
  const Tensor<float>& logits = net.forward(input);
  if (logits.c != 1) fail("shape mismatch", "pruner network must emit one channel");
  double pooled = 0.0;
  for (const float v : logits.data) pooled += static_cast<double>(v);
  pooled /= static_cast<double>(logits.size());
  return sigmoid(pooled);
}

}  // namespace

double pruner_forward(UNet<float>& net, const ScalarVolume& image_patch,
                      const ScalarVolume& repr_patch, const BinaryVolume& pre_mask,
                      const BinaryVolume& post_mask) {
  return pooled_probability(net, pruner_input(image_patch, repr_patch, pre_mask, post_mask));
}

double NetPairScorer::do_score(const Tensor<float>& input, const CandidatePair& /*pair*/) {
  return pooled_probability(*net_, input);
}

double OraclePairScorer::do_score(const Tensor<float>& /*input*/, const CandidatePair& pair) {
  const SynapseEdge* e = world_->find_edge(pair.cleft_id);
  if (e == nullptr) return 0.0;
  const bool pre_ok =
      std::find(e->pre_ids.begin(), e->pre_ids.end(), pair.pre) != e->pre_ids.end();
  const bool post_ok =
      std::find(e->post_ids.begin(), e->post_ids.end(), pair.post) != e->post_ids.end();
  return pre_ok && post_ok ? 1.0 : 0.0;
}

SynapseEdge assign_by_pruner(PairScorer& scorer, const ScalarVolume& image,
                             const LabelVolume& segmentation, const LabelVolume& clefts,
                             std::uint32_t cleft_id, const AssignParams& params,
                             const PrunerContext& ctx) {
  if (ctx.repr == CleftRepr::signed_proximity && ctx.proximity == nullptr)
    fail("bad params", "signed-proximity pruning needs a proximity volume");

  const BinaryVolume mask = mask_of(clefts, cleft_id);
  const Coord center = centroid_of_mask(mask);  // "empty cleft" when absent
  PatchSpec spec = params.patch;
  spec.center = center;

  bool warning = false;
  const std::vector<CandidatePair> pairs = candidate_pairs(
      mask, segmentation, params.dilation_radius_nm, cleft_id, nullptr, &warning);
  if (pairs.empty())
    fail("insufficient candidates", "need at least two candidate segments per cleft");

  const Patch<ScalarVolume> image_patch = extract_patch(image, spec);
  const Patch<LabelVolume> seg_patch = extract_patch(segmentation, spec);
  ScalarVolume repr_patch;
  if (ctx.repr == CleftRepr::mask) {
    const BinaryVolume cleft_patch = cleft_patch_mask(clefts, cleft_id, spec);
    repr_patch = ScalarVolume(spec.shape.z, spec.shape.y, spec.shape.x, image.resolution);
    for (std::size_t i = 0; i < repr_patch.size(); ++i)
      repr_patch[i] = cleft_patch[i] ? 1.0f : 0.0f;
  } else {
    repr_patch = extract_patch(*ctx.proximity, spec).data;
  }

  auto side_mask = [&seg_patch](std::uint32_t id) {
    BinaryVolume m(seg_patch.data.nz, seg_patch.data.ny, seg_patch.data.nx,
                   seg_patch.data.resolution);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = seg_patch.data[i] == id ? 1 : 0;
    return m;
  };

  SynapseEdge edge;
  edge.cleft_id = cleft_id;
  edge.patch_center = center;
  const CandidatePair* best = nullptr;
  double best_score = 0.0;
  bool tie = false;
  for (const CandidatePair& pair : pairs) {
    const Tensor<float> input = pruner_input(image_patch.data, repr_patch,
                                             side_mask(pair.pre), side_mask(pair.post));
    const double s = scorer.score(input, pair);
    if (best == nullptr || s > best_score) {
      best = &pair;
      best_score = s;
      tie = false;
    } else if (s == best_score) {
      tie = true;
    }
  }
  edge.pre_ids = {best->pre};
  edge.post_ids = {best->post};
  edge.pre_scores[best->pre] = best_score;
  edge.post_scores[best->post] = best_score;
  if (tie) edge.flags.push_back("pair_tie");
  return edge;
}

}  // namespace sypa
