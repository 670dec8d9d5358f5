#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>

#include "sypa/edge.hpp"
#include "sypa/net.hpp"
#include "sypa/synthgen.hpp"
#include "sypa/tensor.hpp"
#include "sypa/volume.hpp"

namespace sypa {

struct AssignParams {
  double dilation_radius_nm = 36.0;     // candidate restriction
  std::optional<double> polyadic_tau;   // threshold selection when set; in (0,1)
  PatchSpec patch;                      // shape only; center is set per cleft
};

// Nonzero segment IDs overlapping the cleft mask dilated by a physical radius.
std::set<std::uint32_t> candidate_segments(const BinaryVolume& cleft_mask,
                                           const LabelVolume& segmentation,
                                           double radius_nm);

// Mean of an association-score patch over each candidate's voxels within the
// patch; candidates absent from the patch score 0.
std::map<std::uint32_t, double> score_segments(const ScalarVolume& scores,
                                               const LabelVolume& segmentation_patch,
                                               const std::set<std::uint32_t>& candidates);

// Binary patch of one cleft within the window.
BinaryVolume cleft_patch_mask(const LabelVolume& clefts, std::uint32_t cleft_id,
                              const PatchSpec& spec);

// Association-network input: channel 0 = image, channel 1 = cleft mask.
Tensor<float> avan_input(const ScalarVolume& image_patch, const BinaryVolume& cleft_patch);

// Per-voxel partner scores in [0, 1] over the window, one volume per side.
struct PartnerScores {
  ScalarVolume pre;
  ScalarVolume post;
};

// Scores partner voxels for one cleft window. Implementations count their
// invocations so per-cleft inference cost is observable.
class PartnerPredictor {
 public:
  virtual ~PartnerPredictor() = default;

  PartnerScores predict(const ScalarVolume& image_patch, const BinaryVolume& cleft_patch,
                        std::uint32_t cleft_id, const Coord& patch_offset) {
    ++calls_;
    return do_predict(image_patch, cleft_patch, cleft_id, patch_offset);
  }

  std::int64_t calls() const { return calls_; }
  void reset_calls() { calls_ = 0; }

 private:
  virtual PartnerScores do_predict(const ScalarVolume& image_patch,
                                   const BinaryVolume& cleft_patch, std::uint32_t cleft_id,
                                   const Coord& patch_offset) = 0;
  std::int64_t calls_ = 0;
};

// Trained-network predictor: sigmoid of the two output channels.
class NetPartnerPredictor : public PartnerPredictor {
 public:
  explicit NetPartnerPredictor(UNet<float>& net) : net_(&net) {}

 private:
  PartnerScores do_predict(const ScalarVolume& image_patch, const BinaryVolume& cleft_patch,
                           std::uint32_t cleft_id, const Coord& patch_offset) override;
  UNet<float>* net_;
};

// Ground-truth predictor: emits the true partner masks as scores. Isolates
// the deterministic assignment plumbing from learning quality.
class OraclePartnerPredictor : public PartnerPredictor {
 public:
  explicit OraclePartnerPredictor(const SyntheticWorld& world) : world_(&world) {}

 private:
  PartnerScores do_predict(const ScalarVolume& image_patch, const BinaryVolume& cleft_patch,
                           std::uint32_t cleft_id, const Coord& patch_offset) override;
  const SyntheticWorld* world_;
};

// Window at the cleft centroid, forward pass, dilation-restricted scoring,
// independent argmax per side. Ties break to the smaller segment ID (flag
// "pre_tie"/"post_tie"); a pre == post conflict re-takes the best
// non-conflicting pair by score sum (flag "conflict_resolved").
SynapseEdge assign_partners(PartnerPredictor& predictor, const ScalarVolume& image,
                            const LabelVolume& segmentation, const LabelVolume& clefts,
                            std::uint32_t cleft_id, const AssignParams& params);

// Threshold selection: every candidate scoring strictly above tau, per side;
// an empty side falls back to its argmax (flag "fallback_pre"/"fallback_post").
SynapseEdge assign_partners_polyadic(PartnerPredictor& predictor, const ScalarVolume& image,
                                     const LabelVolume& segmentation,
                                     const LabelVolume& clefts, std::uint32_t cleft_id,
                                     const AssignParams& params);

}  // namespace sypa
