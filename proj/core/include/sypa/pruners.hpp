#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sypa/assignment.hpp"
#include "sypa/edge.hpp"
#include "sypa/net.hpp"
#include "sypa/synthgen.hpp"
#include "sypa/volume.hpp"

namespace sypa {

// Which volume fills the cleft-representation input channel.
enum class CleftRepr { mask, signed_proximity };

// An ordered (pre, post) hypothesis for one cleft.
struct CandidatePair {
  std::uint32_t cleft_id = 0;
  std::uint32_t pre = 0;
  std::uint32_t post = 0;
  std::optional<bool> positive;  // supervision label when truth is known
};

// All ordered pairs of distinct candidate segments, ascending lexicographic.
// Labels are filled from the true edge when given (positive iff pre and post
// both belong to the true sides). Fewer than two candidates yields an empty
// list and sets *warning.
std::vector<CandidatePair> candidate_pairs(const BinaryVolume& cleft_mask,
                                           const LabelVolume& segmentation,
                                           double radius_nm, std::uint32_t cleft_id,
                                           const SynapseEdge* truth, bool* warning);

// Four-channel classifier input: image, cleft representation, candidate pre
// mask, candidate post mask.
Tensor<float> pruner_input(const ScalarVolume& image_patch, const ScalarVolume& repr_patch,
                           const BinaryVolume& pre_mask, const BinaryVolume& post_mask);

// Single pair probability: forward pass, global average pool, sigmoid.
double pruner_forward(UNet<float>& net, const ScalarVolume& image_patch,
                      const ScalarVolume& repr_patch, const BinaryVolume& pre_mask,
                      const BinaryVolume& post_mask);

// Scores one assembled candidate-pair input; counts invocations so the
// pairs-times-network cost profile is observable.
class PairScorer {
 public:
  virtual ~PairScorer() = default;

  double score(const Tensor<float>& input, const CandidatePair& pair) {
    ++calls_;
    return do_score(input, pair);
  }

  std::int64_t calls() const { return calls_; }
  void reset_calls() { calls_ = 0; }

 private:
  virtual double do_score(const Tensor<float>& input, const CandidatePair& pair) = 0;
  std::int64_t calls_ = 0;
};

class NetPairScorer : public PairScorer {
 public:
  explicit NetPairScorer(UNet<float>& net) : net_(&net) {}

 private:
  double do_score(const Tensor<float>& input, const CandidatePair& pair) override;
  UNet<float>* net_;
};

// Scores 1 on the true ordered pair, 0 otherwise.
class OraclePairScorer : public PairScorer {
 public:
  explicit OraclePairScorer(const SyntheticWorld& world) : world_(&world) {}

 private:
  double do_score(const Tensor<float>& input, const CandidatePair& pair) override;
  const SyntheticWorld* world_;
};

// Inputs the pruner needs beyond the image: which representation fills
// channel 1, and the proximity field when that representation is selected.
struct PrunerContext {
  CleftRepr repr = CleftRepr::mask;
  const ScalarVolume* proximity = nullptr;  // required for signed_proximity
};

// Highest-output-pair protocol: scores every ordered candidate pair and
// returns the argmax as the edge (lexicographic tie-break, flagged).
SynapseEdge assign_by_pruner(PairScorer& scorer, const ScalarVolume& image,
                             const LabelVolume& segmentation, const LabelVolume& clefts,
                             std::uint32_t cleft_id, const AssignParams& params,
                             const PrunerContext& ctx);

}  // namespace sypa
