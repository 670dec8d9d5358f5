#include "sypa/combined.hpp"

#include <map>
#include <set>
#include <string>

#include "sypa/error.hpp"

namespace sypa {
namespace {

// Replays remembered partner scores for instance IDs it has already seen; the
// window depends only on the instance, so radius and tau sweeps can reuse
// every forward pass.
class CachingPartnerPredictor : public PartnerPredictor {
 public:
  explicit CachingPartnerPredictor(PartnerPredictor& inner) : inner_(&inner) {}

 private:
  PartnerScores do_predict(const ScalarVolume& image_patch, const BinaryVolume& cleft_patch,
                           std::uint32_t cleft_id, const Coord& patch_offset) override {
    auto it = cache_.find(cleft_id);
    if (it == cache_.end()) {
      PartnerScores scores = inner_->predict(image_patch, cleft_patch, cleft_id, patch_offset);
      it = cache_.emplace(cleft_id, std::move(scores)).first;
    }
    return it->second;
  }

  PartnerPredictor* inner_;
  std::map<std::uint32_t, PartnerScores> cache_;
};

}  // namespace

LabelVolume filter_by_slab(const LabelVolume& labels, const Slab& slab) {
  std::set<std::uint32_t> keep;
  for (const auto& [id, c] : all_centroids(labels)) {
    if (slab.contains(c.z)) keep.insert(id);
  }
  LabelVolume out(labels.nz, labels.ny, labels.nx, labels.resolution);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && keep.count(labels[i]) != 0) out[i] = labels[i];
  }
  return out;
}

EdgeGraph assign_all(PartnerPredictor& predictor, const ScalarVolume& image,
                     const LabelVolume& segmentation, const LabelVolume& instances,
                     const AssignParams& params) {
  EdgeGraph graph;
  for (const auto& [id, count] : label_histogram(instances)) {
    (void)count;
    try {
      SynapseEdge edge = params.polyadic_tau
                             ? assign_partners_polyadic(predictor, image, segmentation,
                                                        instances, id, params)
                             : assign_partners(predictor, image, segmentation, instances, id,
                                               params);
      graph.edges.emplace(id, std::move(edge));
    } catch (const Error& e) {
      SynapseEdge edge;
      edge.cleft_id = id;
      edge.flags.push_back("assignment_failed:" + e.code());
      graph.edges.emplace(id, std::move(edge));
    }
  }
  return graph;
}

CombinedSystem::CombinedSystem(const WorldBundle& bundle, VoxelPredictor& detector,
                               PartnerPredictor& assigner, const DetectParams& detect,
                               const AssignParams& assign)
    : bundle_(&bundle), detector_(&detector), assigner_(&assigner), detect_(detect),
      assign_(assign), slabs_(slab_split(bundle.image.nz)) {}

const ScalarVolume& CombinedSystem::prediction() {
  if (!prediction_) {
    prediction_ = predict_cleft_voxels(*detector_, bundle_->image, detect_);
  }
  return *prediction_;
}

const LabelVolume& CombinedSystem::instances_for(double theta, std::int64_t min_size) {
  const std::pair<double, std::int64_t> key{theta, min_size};
  if (!instance_key_ || *instance_key_ != key) {
    DetectParams p = detect_;
    p.theta = theta;
    p.min_size = min_size;
    instance_cache_ = cleft_instances(prediction(), p);
    instance_key_ = key;
    score_cache_ = std::make_unique<CachingPartnerPredictor>(*assigner_);
  }
  return instance_cache_;
}

AssignParams CombinedSystem::assign_at(const GridPoint& point) const {
  AssignParams p = assign_;
  p.dilation_radius_nm = point.radius_nm;
  if (p.polyadic_tau) p.polyadic_tau = point.tau;
  return p;
}

Prf CombinedSystem::evaluate(const GridPoint& point, bool test_split) {
  const Slab& slab = test_split ? slabs_.test : slabs_.val;
  const LabelVolume inst = filter_by_slab(instances_for(point.theta, point.min_size), slab);
  const EdgeGraph pred =
      assign_all(*score_cache_, bundle_->image, bundle_->world.segmentation, inst,
                 assign_at(point));
  const EdgeGraph truth = truth_graph(bundle_->world, slab);
  const CleftMatch match = match_clefts(inst, filter_by_slab(bundle_->world.cleft_labels, slab));
  return edge_prf(pred, truth, match);
}

EdgeGraph CombinedSystem::predict_edges(const GridPoint& point, const Slab& slab) {
  const LabelVolume inst = filter_by_slab(instances_for(point.theta, point.min_size), slab);
  EdgeGraph graph = assign_all(*score_cache_, bundle_->image, bundle_->world.segmentation,
                               inst, assign_at(point));
  graph.provenance = {{"theta", point.theta},
                      {"min_size", point.min_size},
                      {"radius_nm", point.radius_nm},
                      {"tau", point.tau},
                      {"slab", {{"z0", slab.z0}, {"z1", slab.z1}}}};
  return graph;
}

}  // namespace sypa
