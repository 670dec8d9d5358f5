// Tests for cleft detection: tiled whole-volume inference, threshold +
// connected-component instancing, and the network prediction heads.
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "doctest.h"
#include "sypa/cleft_detect.hpp"
#include "sypa/targets.hpp"
#include "test_support.hpp"

using namespace sypa;

namespace {

// Fills every output voxel with one constant.
class ConstantPredictor : public VoxelPredictor {
 public:
  explicit ConstantPredictor(float value) : value_(value) {}

 private:
  Tensor<float> do_predict(const Tensor<float>& input) override {
    Tensor<float> out(1, input.z, input.y, input.x);
    std::fill(out.data.begin(), out.data.end(), value_);
    return out;
  }
  float value_;
};

// Returns the input tile unchanged.
class EchoPredictor : public VoxelPredictor {
 private:
  Tensor<float> do_predict(const Tensor<float>& input) override { return input; }
};

// Returns a deliberately misshapen tile.
class MisshapenPredictor : public VoxelPredictor {
 private:
  Tensor<float> do_predict(const Tensor<float>& input) override {
    return Tensor<float>(1, input.z + 1, input.y, input.x);
  }
};

ScalarVolume random_image(int nz, int ny, int nx, std::uint64_t seed) {
  ScalarVolume v(nz, ny, nx);
  Rng rng(seed);
  for (float& f : v.data) f = static_cast<float>(rng.real());
  return v;
}

}  // namespace

TEST_CASE("tiling covers the volume with stepped and flush origins") {
  ConstantPredictor pred(0.25f);
  DetectParams p;
  p.tile = Coord{18, 80, 80};
  p.tile_step = Coord{9, 40, 40};

  // Exactly one tile fits.
  predict_cleft_voxels(pred, random_image(18, 80, 80, 1), p);
  CHECK(pred.calls() == 1);

  // Each axis admits two stepped origins: 2 * 2 * 2 tiles.
  pred.reset_calls();
  predict_cleft_voxels(pred, random_image(27, 120, 120, 2), p);
  CHECK(pred.calls() == 8);

  // An axis that the step overshoots gets a final origin flush with the far
  // edge: z origins {0, 9, 10}, y and x origins {0, 40, 80, 81}.
  pred.reset_calls();
  predict_cleft_voxels(pred, random_image(28, 161, 161, 3), p);
  CHECK(pred.calls() == 3 * 4 * 4);
}

TEST_CASE("overlap averaging is exact for agreeing tiles") {
  // A constant prediction must survive any tiling bit-exactly.
  ConstantPredictor pred(0.3691f);
  DetectParams coarse;
  coarse.tile = Coord{6, 16, 16};
  coarse.tile_step = Coord{6, 16, 16};
  DetectParams fine = coarse;
  fine.tile_step = Coord{1, 3, 5};

  const ScalarVolume image = random_image(13, 37, 41, 4);
  const ScalarVolume a = predict_cleft_voxels(pred, image, coarse);
  const ScalarVolume b = predict_cleft_voxels(pred, image, fine);
  REQUIRE(a.size() == image.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == 0.3691f);
    CHECK(b[i] == 0.3691f);
  }

  // An echoing predictor reconstructs the image exactly: every voxel is the
  // mean of identical contributions, including flush-edge overlaps.
  EchoPredictor echo;
  const ScalarVolume c = predict_cleft_voxels(echo, image, fine);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == image[i]);
}

TEST_CASE("detection rejects bad parameters and undersized volumes") {
  ConstantPredictor pred(0.5f);
  const ScalarVolume image = random_image(18, 80, 80, 5);

  DetectParams p;
  p.tile = Coord{18, 80, 80};
  CHECK_ERROR_CODE(predict_cleft_voxels(pred, random_image(17, 80, 80, 6), p),
                   "volume too small for patch");
  CHECK_ERROR_CODE(predict_cleft_voxels(pred, random_image(18, 80, 79, 7), p),
                   "volume too small for patch");

  auto reject = [&](auto mutate) {
    DetectParams bad = p;
    mutate(bad);
    CHECK_ERROR_CODE(predict_cleft_voxels(pred, image, bad), "bad params");
  };
  reject([](DetectParams& d) { d.theta = 0.0; });
  reject([](DetectParams& d) { d.theta = 1.0; });  // mask head: open interval
  reject([](DetectParams& d) {
    d.representation = CleftRepr::signed_proximity;
    d.theta = 1.0000001;
  });
  reject([](DetectParams& d) {
    d.representation = CleftRepr::signed_proximity;
    d.theta = 0.0;
  });
  reject([](DetectParams& d) { d.min_size = -1; });
  reject([](DetectParams& d) { d.tile.y = 0; });
  reject([](DetectParams& d) { d.tile_step.x = 0; });

  // theta = 1 is a legal proximity threshold.
  DetectParams prox = p;
  prox.representation = CleftRepr::signed_proximity;
  prox.theta = 1.0;
  predict_cleft_voxels(pred, image, prox);

  MisshapenPredictor bad_shape;
  CHECK_ERROR_CODE(predict_cleft_voxels(bad_shape, image, p), "shape mismatch");
}

TEST_CASE("instancing thresholds, filters by size, and relabels in scan order") {
  ScalarVolume pred(1, 4, 10);
  // Component A: three voxels in row 0. Component B: one voxel in row 3, far
  // corner. A diagonal neighbour of A (row 1, x 3) joins it 26-connectedly.
  pred.data[pred.index(0, 0, 0)] = 0.9f;
  pred.data[pred.index(0, 0, 1)] = 0.8f;
  pred.data[pred.index(0, 0, 2)] = 0.5f;  // >= theta keeps the boundary voxel
  pred.data[pred.index(0, 1, 3)] = 0.7f;
  pred.data[pred.index(0, 3, 9)] = 0.95f;

  DetectParams p;
  p.theta = 0.5;
  p.min_size = 0;
  const LabelVolume all = cleft_instances(pred, p);
  std::map<std::uint32_t, std::uint64_t> sizes = label_histogram(all);
  REQUIRE(sizes.size() == 2);
  CHECK(sizes.at(1) == 4);  // scan order: component A first
  CHECK(sizes.at(2) == 1);
  CHECK(all.data[all.index(0, 1, 3)] == 1);  // diagonal joined under 26-conn
  CHECK(all.data[all.index(0, 3, 9)] == 2);

  // min_size drops the singleton; survivors are renumbered from 1.
  p.min_size = 2;
  const LabelVolume big = cleft_instances(pred, p);
  sizes = label_histogram(big);
  REQUIRE(sizes.size() == 1);
  CHECK(sizes.at(1) == 4);
  CHECK(big.data[big.index(0, 3, 9)] == 0);

  // A threshold above every voxel leaves nothing.
  p.theta = 0.96;
  p.min_size = 0;
  CHECK(label_histogram(cleft_instances(pred, p)).empty());
}

TEST_CASE("proximity instancing binarizes on magnitude") {
  ScalarVolume pred(1, 1, 6);
  pred.data = {0.0f, -0.8f, -0.6f, 0.7f, 0.9f, 0.2f};
  DetectParams p;
  p.representation = CleftRepr::signed_proximity;
  p.theta = 0.5;
  const LabelVolume inst = cleft_instances(pred, p);
  // Both signs clear the magnitude threshold and the voxels are adjacent, so
  // the pre and post flanks fuse into a single instance.
  const std::vector<std::uint32_t> want{0, 1, 1, 1, 1, 0};
  CHECK(inst.data == want);
}

TEST_CASE("network predictors apply the matching output head") {
  NetConfig cfg;
  cfg.in_channels = 1;
  cfg.out_channels = 1;
  cfg.width = 3;
  cfg.depth = 1;
  cfg.seed = 11;
  UNet<float> net = build_network<float>(cfg);
  UNet<float> twin = build_network<float>(cfg);

  Tensor<float> input(1, 2, 8, 8);
  Rng rng(12);
  for (float& v : input.data) v = static_cast<float>(rng.real());
  const Tensor<float> logits = twin.forward(input);

  NetVoxelPredictor mask_head(net, CleftRepr::mask);
  const Tensor<float> pm = mask_head.predict(input);
  REQUIRE(pm.size() == logits.size());
  for (std::size_t i = 0; i < pm.size(); ++i) {
    CHECK(pm.data[i] ==
          doctest::Approx(sigmoid(static_cast<double>(logits.data[i]))).epsilon(1e-6));
  }

  NetVoxelPredictor prox_head(net, CleftRepr::signed_proximity);
  const Tensor<float> pp = prox_head.predict(input);
  for (std::size_t i = 0; i < pp.size(); ++i) {
    CHECK(pp.data[i] ==
          doctest::Approx(std::tanh(static_cast<double>(logits.data[i]))).epsilon(1e-6));
    CHECK(pp.data[i] > -1.0f);
    CHECK(pp.data[i] < 1.0f);
  }

  NetConfig wide = cfg;
  wide.out_channels = 2;
  UNet<float> two = build_network<float>(wide);
  NetVoxelPredictor bad(two, CleftRepr::mask);
  CHECK_ERROR_CODE(bad.predict(input), "shape mismatch");
}

TEST_CASE("instancing a true cleft mask recovers the generator's clefts") {
  GenParams gp;
  gp.shape = Coord{24, 96, 96};
  gp.neurite_count = 12;
  gp.synapse_count = 14;
  gp.seed = 23;
  const SyntheticWorld world = generate_world(gp);
  REQUIRE(!world.true_edges.empty());

  const BinaryVolume mask = cleft_mask_target(world);
  ScalarVolume pred(mask.nz, mask.ny, mask.nx, mask.resolution);
  for (std::size_t i = 0; i < mask.size(); ++i) pred[i] = mask[i] ? 1.0f : 0.0f;

  DetectParams p;
  p.theta = 0.5;
  const LabelVolume inst = cleft_instances(pred, p);
  const auto sizes = label_histogram(inst);
  CHECK(sizes.size() == world.true_edges.size());

  // Placement keeps clefts well separated, so instances and true clefts must
  // correspond one-to-one with identical voxel sets.
  std::map<std::uint32_t, std::set<std::uint32_t>> overlap;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    CHECK((inst.data[i] != 0) == (world.cleft_labels.data[i] != 0));
    if (inst.data[i] != 0) overlap[inst.data[i]].insert(world.cleft_labels.data[i]);
  }
  std::set<std::uint32_t> seen;
  for (const auto& [id, trues] : overlap) {
    CHECK(trues.size() == 1);
    seen.insert(*trues.begin());
  }
  CHECK(seen.size() == world.true_edges.size());
}
