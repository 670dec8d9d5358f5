#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "sypa/pruners.hpp"
#include "sypa/synthgen.hpp"
#include "sypa/targets.hpp"
#include "sypa/train.hpp"
#include "sypa/volume.hpp"

namespace sypa {

// Association-network examples: a window centred on a uniformly drawn
// training-slab cleft voxel; input [image, that cleft's mask], target the
// true pre/post partner masks.
class AvanSampler : public ExampleSampler {
 public:
  AvanSampler(std::vector<const WorldBundle*> worlds, const PatchSpec& patch);

  TrainingExample next(Rng& rng) override;

  // Location draw without patch assembly; (world index, cleft ID, voxel
  // index). Exposed so sampling-distribution tests can draw cheaply.
  struct Location {
    int world = 0;
    std::uint32_t cleft = 0;
    std::size_t voxel = 0;
  };
  const Location& sample_location(Rng& rng) const;
  std::size_t location_count() const { return locations_.size(); }

 private:
  std::vector<const WorldBundle*> worlds_;
  PatchSpec patch_;
  std::vector<Location> locations_;
};

// Candidate-pair classifier examples, alternating positive and negative pairs
// (1:1 balance). Input channels: image, cleft representation, candidate pre
// mask, candidate post mask; target a single probability label.
class PrunerSampler : public ExampleSampler {
 public:
  PrunerSampler(std::vector<const WorldBundle*> worlds, const PatchSpec& patch,
                CleftRepr repr, double radius_nm,
                const SignedProximityParams& prox = {});

  TrainingExample next(Rng& rng) override;

 private:
  struct PairExample {
    int world = 0;
    CandidatePair pair;
  };
  TrainingExample assemble(Rng& rng, const std::vector<PairExample>& pool);

  std::vector<const WorldBundle*> worlds_;
  PatchSpec patch_;
  CleftRepr repr_;
  std::vector<ScalarVolume> proximity_;  // per world, signed_proximity only
  std::vector<std::map<std::uint32_t, Coord>> centroids_;
  std::vector<PairExample> positives_, negatives_;
  bool want_positive_ = true;
};

// Detector examples: image window in, dense target window out, alternating
// cleft-centred and uniform training-slab windows so background is seen.
class DetectorSampler : public ExampleSampler {
 public:
  DetectorSampler(std::vector<const WorldBundle*> worlds, const PatchSpec& patch,
                  CleftRepr repr, const SignedProximityParams& prox = {});

  TrainingExample next(Rng& rng) override;

 private:
  std::vector<const WorldBundle*> worlds_;
  PatchSpec patch_;
  std::vector<ScalarVolume> targets_;  // per world, full-volume target field
  std::vector<AvanSampler::Location> cleft_locations_;
  std::vector<Slab> train_slabs_;
  bool centred_ = true;
};

}  // namespace sypa
