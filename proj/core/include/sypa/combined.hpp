#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>

#include "sypa/assignment.hpp"
#include "sypa/cleft_detect.hpp"
#include "sypa/evaluation.hpp"
#include "sypa/synthgen.hpp"

namespace sypa {

// Keep only IDs whose centroid z falls in the slab; survivors keep their IDs.
LabelVolume filter_by_slab(const LabelVolume& labels, const Slab& slab);

// Windowed partner assignment over every instance in the map. Instances where
// assignment cannot produce an edge (e.g. fewer than two nearby segments)
// yield a flagged empty edge, so downstream precision still pays for them.
EdgeGraph assign_all(PartnerPredictor& predictor, const ScalarVolume& image,
                     const LabelVolume& segmentation, const LabelVolume& instances,
                     const AssignParams& params);

// Detector + partner assignment evaluated end to end against slab truth.
// Caching follows the declared grid order: the dense detector output is
// computed once per volume; the instance map and the per-instance partner
// scores are reused while (theta, min_size) stays fixed and only the
// dilation radius / tau vary.
class CombinedSystem {
 public:
  CombinedSystem(const WorldBundle& bundle, VoxelPredictor& detector,
                 PartnerPredictor& assigner, const DetectParams& detect,
                 const AssignParams& assign);

  // Edge-level scores at one grid point, on the validation or test slab.
  Prf evaluate(const GridPoint& point, bool test_split);

  // Slab-filtered predicted edges at a grid point, for report artifacts.
  EdgeGraph predict_edges(const GridPoint& point, const Slab& slab);

  // Dense detector output over the whole volume (computed on first use).
  const ScalarVolume& prediction();

 private:
  const LabelVolume& instances_for(double theta, std::int64_t min_size);
  AssignParams assign_at(const GridPoint& point) const;

  const WorldBundle* bundle_;
  VoxelPredictor* detector_;
  PartnerPredictor* assigner_;
  DetectParams detect_;
  AssignParams assign_;
  SlabSplit slabs_;

  std::optional<ScalarVolume> prediction_;
  std::optional<std::pair<double, std::int64_t>> instance_key_;
  LabelVolume instance_cache_;
  std::unique_ptr<PartnerPredictor> score_cache_;  // valid for one instance map
};

}  // namespace sypa
