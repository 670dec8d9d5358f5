#include "sypa/samplers.hpp"

#include <set>
#include <utility>

#include "sypa/assignment.hpp"
#include "sypa/error.hpp"

namespace sypa {
namespace {

ScalarVolume to_scalar(const BinaryVolume& mask) {
  ScalarVolume out(mask.nz, mask.ny, mask.nx, mask.resolution);
  for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i] ? 1.0f : 0.0f;
  return out;
}

BinaryVolume id_mask_patch(const LabelVolume& segmentation_patch, std::uint32_t id) {
  BinaryVolume out(segmentation_patch.nz, segmentation_patch.ny, segmentation_patch.nx,
                   segmentation_patch.resolution);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = segmentation_patch[i] == id ? 1 : 0;
  return out;
}

Tensor<float> one_channel(const ScalarVolume& v) {
  Tensor<float> t(1, v.nz, v.ny, v.nx);
  std::copy(v.data.begin(), v.data.end(), t.data.begin());
  return t;
}

}  // namespace

AvanSampler::AvanSampler(std::vector<const WorldBundle*> worlds, const PatchSpec& patch)
    : worlds_(std::move(worlds)), patch_(patch) {
  for (int w = 0; w < static_cast<int>(worlds_.size()); ++w) {
    const SyntheticWorld& world = worlds_[w]->world;
    const Slab train = slab_split(world.cleft_labels.nz).train;
    const auto ids = clefts_in_slab(world, train);
    const std::set<std::uint32_t> keep(ids.begin(), ids.end());
    const LabelVolume& clefts = world.cleft_labels;
    for (std::size_t i = 0; i < clefts.size(); ++i) {
      const std::uint32_t id = clefts[i];
      if (id != 0 && keep.count(id) != 0) locations_.push_back({w, id, i});
    }
  }
  if (locations_.empty()) {
    fail("no training locations", "no cleft voxels fall in any training slab");
  }
}

const AvanSampler::Location& AvanSampler::sample_location(Rng& rng) const {
  return locations_[rng.below(locations_.size())];
}

TrainingExample AvanSampler::next(Rng& rng) {
  const Location& loc = sample_location(rng);
  const WorldBundle& bundle = *worlds_[loc.world];
  const SyntheticWorld& world = bundle.world;

  PatchSpec spec = patch_;
  spec.center = world.cleft_labels.coord_of(loc.voxel);

  const auto image = extract_patch(bundle.image, spec);
  const BinaryVolume cleft = cleft_patch_mask(world.cleft_labels, loc.cleft, spec);
  const PartnerMasks masks = partner_mask_targets(world, loc.cleft, spec);

  TrainingExample ex;
  ex.input = avan_input(image.data, cleft);
  ex.target.ensure(2, spec.shape.z, spec.shape.y, spec.shape.x);
  const std::size_t n = ex.target.spatial();
  for (std::size_t i = 0; i < n; ++i) {
    ex.target.data[i] = masks.pre[i] ? 1.0f : 0.0f;
    ex.target.data[n + i] = masks.post[i] ? 1.0f : 0.0f;
  }
  ex.cleft_id = loc.cleft;
  ex.center = spec.center;
  return ex;
}

PrunerSampler::PrunerSampler(std::vector<const WorldBundle*> worlds, const PatchSpec& patch,
                             CleftRepr repr, double radius_nm,
                             const SignedProximityParams& prox)
    : worlds_(std::move(worlds)), patch_(patch), repr_(repr) {
  for (int w = 0; w < static_cast<int>(worlds_.size()); ++w) {
    const SyntheticWorld& world = worlds_[w]->world;
    if (repr_ == CleftRepr::signed_proximity) {
      proximity_.push_back(signed_proximity_target(world, prox));
    }
    centroids_.push_back(all_centroids(world.cleft_labels));

    const Slab train = slab_split(world.cleft_labels.nz).train;
    for (std::uint32_t id : clefts_in_slab(world, train)) {
      const BinaryVolume mask = mask_of(world.cleft_labels, id);
      bool warning = false;
      const auto pairs = candidate_pairs(mask, world.segmentation, radius_nm, id,
                                         world.find_edge(id), &warning);
      for (const CandidatePair& pair : pairs) {
        (pair.positive.value_or(false) ? positives_ : negatives_).push_back({w, pair});
      }
    }
  }
  if (positives_.empty() || negatives_.empty()) {
    fail("no training locations", "need at least one positive and one negative pair");
  }
}

TrainingExample PrunerSampler::assemble(Rng& rng, const std::vector<PairExample>& pool) {
  const PairExample& pe = pool[rng.below(pool.size())];
  const WorldBundle& bundle = *worlds_[pe.world];
  const SyntheticWorld& world = bundle.world;

  PatchSpec spec = patch_;
  spec.center = centroids_[pe.world].at(pe.pair.cleft_id);

  const auto image = extract_patch(bundle.image, spec);
  ScalarVolume repr;
  if (repr_ == CleftRepr::mask) {
    repr = to_scalar(cleft_patch_mask(world.cleft_labels, pe.pair.cleft_id, spec));
  } else {
    PatchSpec zero_pad = spec;
    zero_pad.pad_value = 0.0;
    repr = extract_patch(proximity_[pe.world], zero_pad).data;
  }
  const auto seg = extract_patch(world.segmentation, spec);

  TrainingExample ex;
  ex.input = pruner_input(image.data, repr, id_mask_patch(seg.data, pe.pair.pre),
                          id_mask_patch(seg.data, pe.pair.post));
  ex.target.ensure(1, 1, 1, 1);
  ex.target.data[0] = pe.pair.positive.value_or(false) ? 1.0f : 0.0f;
  ex.cleft_id = pe.pair.cleft_id;
  ex.center = spec.center;
  return ex;
}

TrainingExample PrunerSampler::next(Rng& rng) {
  const bool positive = want_positive_;
  want_positive_ = !want_positive_;
  return assemble(rng, positive ? positives_ : negatives_);
}

DetectorSampler::DetectorSampler(std::vector<const WorldBundle*> worlds,
                                 const PatchSpec& patch, CleftRepr repr,
                                 const SignedProximityParams& prox)
    : worlds_(std::move(worlds)), patch_(patch) {
  for (int w = 0; w < static_cast<int>(worlds_.size()); ++w) {
    const SyntheticWorld& world = worlds_[w]->world;
    if (repr == CleftRepr::mask) {
      targets_.push_back(to_scalar(cleft_mask_target(world)));
    } else {
      targets_.push_back(signed_proximity_target(world, prox));
    }

    const Slab train = slab_split(world.cleft_labels.nz).train;
    train_slabs_.push_back(train);
    const auto ids = clefts_in_slab(world, train);
    const std::set<std::uint32_t> keep(ids.begin(), ids.end());
    const LabelVolume& clefts = world.cleft_labels;
    for (std::size_t i = 0; i < clefts.size(); ++i) {
      const std::uint32_t id = clefts[i];
      if (id != 0 && keep.count(id) != 0) cleft_locations_.push_back({w, id, i});
    }
  }
  if (cleft_locations_.empty()) {
    fail("no training locations", "no cleft voxels fall in any training slab");
  }
}

TrainingExample DetectorSampler::next(Rng& rng) {
  const bool centred = centred_;
  centred_ = !centred_;

  int w = 0;
  PatchSpec spec = patch_;
  std::uint32_t cleft_id = 0;
  if (centred) {
    const auto& loc = cleft_locations_[rng.below(cleft_locations_.size())];
    w = loc.world;
    spec.center = worlds_[w]->world.cleft_labels.coord_of(loc.voxel);
    cleft_id = loc.cleft;
  } else {
    w = static_cast<int>(rng.below(worlds_.size()));
    const Slab& slab = train_slabs_[w];
    const Coord shape = worlds_[w]->image.shape();
    spec.center = {slab.z0 + static_cast<int>(rng.below(slab.extent())),
                   static_cast<int>(rng.below(shape.y)),
                   static_cast<int>(rng.below(shape.x))};
  }

  const auto image = extract_patch(worlds_[w]->image, spec);
  PatchSpec zero_pad = spec;
  zero_pad.pad_value = 0.0;
  const auto target = extract_patch(targets_[w], zero_pad);

  TrainingExample ex;
  ex.input = one_channel(image.data);
  ex.target = one_channel(target.data);
  ex.cleft_id = cleft_id;
  ex.center = spec.center;
  return ex;
}

}  // namespace sypa
