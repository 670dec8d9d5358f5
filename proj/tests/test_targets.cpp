// Tests for the supervision targets: the cleft union mask, the signed
// proximity ramp (hand-computed 1-D oracles, tie rules, support cutoff), and
// per-cleft partner masks.
#include <cmath>
#include <set>

#include "doctest.h"
#include "sypa/targets.hpp"
#include "sypa/volume.hpp"
#include "test_support.hpp"

using namespace sypa;

namespace {

// One-row world: presynaptic segment 1 on [0,8], a single cleft voxel at
// x = 10, postsynaptic segment 2 on [12,19].
SyntheticWorld row_world() {
  SyntheticWorld w;
  w.segmentation = LabelVolume(1, 1, 20);
  w.cleft_labels = LabelVolume(1, 1, 20);
  for (int x = 0; x <= 8; ++x) w.segmentation.data[x] = 1;
  for (int x = 12; x <= 19; ++x) w.segmentation.data[x] = 2;
  w.cleft_labels.data[10] = 1;
  SynapseEdge e;
  e.cleft_id = 1;
  e.pre_ids = {1};
  e.post_ids = {2};
  w.true_edges = {e};
  w.roles = {{1, NeuriteRole::axon}, {2, NeuriteRole::dendrite}};
  return w;
}

}  // namespace

TEST_CASE("cleft mask target marks exactly the labelled voxels") {
  SyntheticWorld w = row_world();
  w.cleft_labels.data[3] = 7;  // a second cleft, any label
  const BinaryVolume mask = cleft_mask_target(w);
  REQUIRE(mask.data.size() == w.cleft_labels.data.size());
  for (std::size_t i = 0; i < mask.data.size(); ++i)
    CHECK(mask.data[i] == (w.cleft_labels.data[i] != 0 ? 1 : 0));
  CHECK(mask.resolution == w.cleft_labels.resolution);
}

TEST_CASE("signed proximity follows the hand-computed 1-D ramp") {
  const SyntheticWorld w = row_world();
  SignedProximityParams p;
  p.d_max_nm = 60.0;  // five 12 nm voxels of support
  const ScalarVolume f = signed_proximity_target(w, p);

  // Magnitude 1 - d/60 with d = 12|x - 10|; sign + on segment 1, - on
  // segment 2; the cleft voxel itself is extracellular and equidistant from
  // both partners, so its sign ties to zero.
  const double expect[20] = {0, 0,    0,    0,    0,    0,    0.2, 0.4,  0.6,  0.8,
                             0, -0.8, -0.6, -0.4, -0.2, 0.0,  0,   0,    0,    0};
  for (int x = 0; x < 20; ++x)
    CHECK(f.data[x] == doctest::Approx(expect[x]).epsilon(1e-6));
}

TEST_CASE("signed proximity support ends exactly at d_max") {
  const SyntheticWorld w = row_world();
  SignedProximityParams p;
  p.d_max_nm = 24.0;  // two voxels: d = 24 gives magnitude exactly zero
  const ScalarVolume f = signed_proximity_target(w, p);
  CHECK(f.data[9] == doctest::Approx(0.5));
  CHECK(f.data[11] == doctest::Approx(-0.5));
  CHECK(f.data[8] == 0.0f);   // d == d_max: ramp hits zero
  CHECK(f.data[12] == 0.0f);
  CHECK(f.data[7] == 0.0f);   // beyond support
}

TEST_CASE("equidistant voxels belong to the smaller cleft ID") {
  // Segment 2 sits between two clefts. Edge 1 lists it postsynaptic, edge 2
  // lists it presynaptic, so the owner's identity shows in the sign.
  SyntheticWorld w;
  w.segmentation = LabelVolume(1, 1, 21);
  w.cleft_labels = LabelVolume(1, 1, 21);
  for (int x = 0; x <= 3; ++x) w.segmentation.data[x] = 1;
  for (int x = 7; x <= 13; ++x) w.segmentation.data[x] = 2;
  for (int x = 17; x <= 20; ++x) w.segmentation.data[x] = 3;
  w.cleft_labels.data[5] = 1;
  w.cleft_labels.data[15] = 2;
  SynapseEdge e1, e2;
  e1.cleft_id = 1;
  e1.pre_ids = {1};
  e1.post_ids = {2};
  e2.cleft_id = 2;
  e2.pre_ids = {2};
  e2.post_ids = {3};
  w.true_edges = {e1, e2};

  SignedProximityParams p;
  p.d_max_nm = 72.0;
  const ScalarVolume f = signed_proximity_target(w, p);
  // x = 10 is 60 nm from both clefts; cleft 1 wins the tie and calls
  // segment 2 postsynaptic.
  CHECK(f.data[10] == doctest::Approx(-(1.0 - 60.0 / 72.0)).epsilon(1e-6));
  // One voxel to either side the nearer cleft owns the point outright.
  CHECK(f.data[9] == doctest::Approx(-(1.0 - 48.0 / 72.0)).epsilon(1e-6));
  CHECK(f.data[11] == doctest::Approx(1.0 - 48.0 / 72.0).epsilon(1e-6));
}

TEST_CASE("clefts without a true edge and bystander segments stay zero") {
  SyntheticWorld w = row_world();
  // An orphan cleft label with no matching edge contributes no direction.
  w.true_edges.clear();
  SignedProximityParams p;
  const ScalarVolume f = signed_proximity_target(w, p);
  for (float v : f.data) CHECK(v == 0.0f);

  // A labelled segment that is neither partner keeps value zero even inside
  // the support radius.
  SyntheticWorld w2 = row_world();
  for (int x = 12; x <= 19; ++x) w2.segmentation.data[x] = 9;  // not a partner
  const ScalarVolume g = signed_proximity_target(w2, SignedProximityParams{60.0});
  CHECK(g.data[8] > 0.0f);    // presynaptic side still ramps
  CHECK(g.data[12] == 0.0f);  // bystander side is directionless
  CHECK(g.data[13] == 0.0f);
}

TEST_CASE("signed proximity rejects a non-positive support radius") {
  const SyntheticWorld w = row_world();
  CHECK_ERROR_CODE(signed_proximity_target(w, SignedProximityParams{0.0}), "bad params");
  CHECK_ERROR_CODE(signed_proximity_target(w, SignedProximityParams{-5.0}), "bad params");
}

TEST_CASE("signed proximity on a generated world stays within support") {
  GenParams gp;
  gp.shape = Coord{24, 96, 96};
  gp.neurite_count = 12;
  gp.synapse_count = 12;
  gp.seed = 3;
  const SyntheticWorld w = generate_world(gp);
  REQUIRE(!w.true_edges.empty());

  SignedProximityParams p;  // 150 nm
  const ScalarVolume f = signed_proximity_target(w, p);
  const BinaryVolume support = dilate(cleft_mask_target(w), p.d_max_nm);
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < f.data.size(); ++i) {
    CHECK(std::abs(f.data[i]) <= 1.0f);
    if (support.data[i] == 0) REQUIRE(f.data[i] == 0.0f);
    has_pos = has_pos || f.data[i] > 0.0f;
    has_neg = has_neg || f.data[i] < 0.0f;
  }
  CHECK(has_pos);
  CHECK(has_neg);
}

TEST_CASE("partner masks cut the true segments out of the window") {
  const SyntheticWorld w = row_world();
  PatchSpec spec;
  spec.center = Coord{0, 0, 10};
  spec.shape = Coord{1, 1, 8};
  const PartnerMasks m = partner_mask_targets(w, 1, spec);

  // Patch spans x in [6, 14); segment 1 covers [6,8], segment 2 [12,13].
  CHECK(m.offset == Coord{0, 0, 6});
  REQUIRE(m.pre.data.size() == 8);
  const std::uint8_t expect_pre[8] = {1, 1, 1, 0, 0, 0, 0, 0};
  const std::uint8_t expect_post[8] = {0, 0, 0, 0, 0, 0, 1, 1};
  for (int i = 0; i < 8; ++i) {
    CHECK(m.pre.data[i] == expect_pre[i]);
    CHECK(m.post.data[i] == expect_post[i]);
  }
}

TEST_CASE("partner masks pad out-of-bounds regions with background") {
  const SyntheticWorld w = row_world();
  PatchSpec spec;
  spec.center = Coord{0, 0, 1};
  spec.shape = Coord{1, 1, 10};
  const PartnerMasks m = partner_mask_targets(w, 1, spec);
  CHECK(m.offset == Coord{0, 0, -4});
  for (int i = 0; i < 4; ++i) {
    CHECK(m.pre.data[i] == 0);  // left of the volume
    CHECK(m.post.data[i] == 0);
  }
  for (int i = 4; i < 10; ++i) CHECK(m.pre.data[i] == 1);  // x in [0,5]
}

TEST_CASE("polyadic partner masks take the union over partners") {
  SyntheticWorld w = row_world();
  for (int x = 15; x <= 19; ++x) w.segmentation.data[x] = 4;
  w.true_edges[0].post_ids = {2, 4};
  PatchSpec spec;
  spec.center = Coord{0, 0, 10};
  spec.shape = Coord{1, 1, 20};
  const PartnerMasks m = partner_mask_targets(w, 1, spec);
  // Window covers the whole row; both postsynaptic segments mark the mask.
  for (int x = 12; x <= 14; ++x) CHECK(m.post.data[x] == 1);
  for (int x = 15; x <= 19; ++x) CHECK(m.post.data[x] == 1);
  CHECK(m.post.data[10] == 0);
}

TEST_CASE("partner masks require a known cleft") {
  const SyntheticWorld w = row_world();
  PatchSpec spec;
  spec.center = Coord{0, 0, 10};
  spec.shape = Coord{1, 1, 4};
  CHECK_ERROR_CODE(partner_mask_targets(w, 42, spec), "unknown label");
}
