#pragma once

#include <cstdint>

#include "sypa/net.hpp"
#include "sypa/pruners.hpp"
#include "sypa/tensor.hpp"
#include "sypa/volume.hpp"

namespace sypa {

// Voxel threshold, instance size filter, and inference tiling for turning a
// detector's dense prediction into cleft instances.
struct DetectParams {
  CleftRepr representation = CleftRepr::mask;
  double theta = 0.5;          // >= theta (mask) or |value| >= theta (proximity)
  std::int64_t min_size = 0;   // components smaller than this are discarded
  Coord tile{18, 80, 80};
  Coord tile_step{9, 40, 40};  // overlap policy: stride between tile origins
};

// Dense single-channel prediction over a tile. Implementations return values
// already through their output head (sigmoid for masks, tanh for proximity).
class VoxelPredictor {
 public:
  virtual ~VoxelPredictor() = default;

  Tensor<float> predict(const Tensor<float>& input) {
    ++calls_;
    return do_predict(input);
  }

  std::int64_t calls() const { return calls_; }
  void reset_calls() { calls_ = 0; }

 private:
  virtual Tensor<float> do_predict(const Tensor<float>& input) = 0;
  std::int64_t calls_ = 0;
};

class NetVoxelPredictor : public VoxelPredictor {
 public:
  NetVoxelPredictor(UNet<float>& net, CleftRepr repr) : net_(&net), repr_(repr) {}

 private:
  Tensor<float> do_predict(const Tensor<float>& input) override;
  UNet<float>* net_;
  CleftRepr repr_;
};

// Whole-volume prediction assembled from overlapping tiles; voxels covered by
// several tiles take the average (accumulated in double, so constant fields
// reproduce bit-exactly under any tiling).
ScalarVolume predict_cleft_voxels(VoxelPredictor& predictor, const ScalarVolume& image,
                                  const DetectParams& params);

// Binarize, 26-connected components, drop components below min_size; the
// surviving instances are relabelled 1..k in scan order.
LabelVolume cleft_instances(const ScalarVolume& prediction, const DetectParams& params);

}  // namespace sypa
