#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <vector>

#include "doctest.h"
#include "sypa/error.hpp"
#include "test_support.hpp"
#include "sypa/rng.hpp"
#include "sypa/volume.hpp"

using namespace sypa;

namespace {

BinaryVolume random_mask(Rng& rng, int n, double p, VoxelResolution res = {}) {
  BinaryVolume m(n, n, n, res);
  for (auto& v : m.data) v = rng.real() < p ? 1 : 0;
  return m;
}

// Reference labelling: BFS flood fill, components numbered 1..k in ascending
// order of their first foreground voxel in scan order (the same convention
// the library promises).
LabelVolume cc_reference(const BinaryVolume& mask, Connectivity conn) {
  LabelVolume out(mask.nz, mask.ny, mask.nx, mask.resolution);
  std::uint32_t next = 0;
  std::queue<Coord> frontier;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start] || out[start] != 0) continue;
    ++next;
    out[start] = next;
    frontier.push(mask.coord_of(start));
    while (!frontier.empty()) {
      const Coord c = frontier.front();
      frontier.pop();
      for (int dz = -1; dz <= 1; ++dz) {
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dz == 0 && dy == 0 && dx == 0) continue;
            if (conn == Connectivity::six && std::abs(dz) + std::abs(dy) + std::abs(dx) != 1)
              continue;
            const int z = c.z + dz, y = c.y + dy, x = c.x + dx;
            if (!mask.in_bounds(z, y, x)) continue;
            const std::size_t i = mask.index(z, y, x);
            if (mask[i] && out[i] == 0) {
              out[i] = next;
              frontier.push({z, y, x});
            }
          }
        }
      }
    }
  }
  return out;
}

// Reference dilation: scan every pair of voxels.
BinaryVolume dilate_reference(const BinaryVolume& mask, double radius_nm) {
  std::vector<Coord> fg;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) fg.push_back(mask.coord_of(i));
  }
  const auto& r = mask.resolution;
  BinaryVolume out(mask.nz, mask.ny, mask.nx, mask.resolution);
  const double r2 = radius_nm * radius_nm;
  for (int z = 0; z < mask.nz; ++z) {
    for (int y = 0; y < mask.ny; ++y) {
      for (int x = 0; x < mask.nx; ++x) {
        for (const Coord& f : fg) {
          const double dz = (f.z - z) * r.dz, dy = (f.y - y) * r.dy, dx = (f.x - x) * r.dx;
          if (dz * dz + dy * dy + dx * dx <= r2) {
            out.at(z, y, x) = 1;
            break;
          }
        }
      }
    }
  }
  return out;
}

LabelVolume random_labels(Rng& rng, int n, std::uint32_t max_id) {
  LabelVolume v(n, n, n);
  for (auto& e : v.data) e = static_cast<std::uint32_t>(rng.below(max_id + 1));
  return v;
}

}  // namespace

TEST_CASE("connected components match flood fill on random volumes") {
  Rng rng(20260401);
  for (int trial = 0; trial < 100; ++trial) {
    const double p = 0.15 + 0.5 * rng.real();
    const auto conn = trial % 2 == 0 ? Connectivity::six : Connectivity::twenty_six;
    const BinaryVolume mask = random_mask(rng, 16, p);
    const LabelVolume got = connected_components(mask, conn);
    const LabelVolume want = cc_reference(mask, conn);
    REQUIRE(got.data == want.data);
  }
}

TEST_CASE("connectivity six splits what twenty-six joins") {
  BinaryVolume m(3, 3, 3);
  m.at(1, 1, 1) = 1;
  m.at(2, 2, 2) = 1;  // diagonal neighbour
  CHECK(label_histogram(connected_components(m, Connectivity::six)).size() == 2);
  CHECK(label_histogram(connected_components(m, Connectivity::twenty_six)).size() == 1);
}

TEST_CASE("connected components label IDs follow scan order of first voxels") {
  BinaryVolume m(1, 1, 5);
  m.at(0, 0, 0) = 1;
  m.at(0, 0, 2) = 1;
  m.at(0, 0, 4) = 1;
  const LabelVolume lab = connected_components(m, Connectivity::six);
  CHECK(lab.at(0, 0, 0) == 1);
  CHECK(lab.at(0, 0, 2) == 2);
  CHECK(lab.at(0, 0, 4) == 3);
}

TEST_CASE("dilation matches all-pairs reference on random volumes") {
  Rng rng(20260402);
  const double radii[] = {0.0, 12.0, 24.0, 30.0, 36.0, 42.5, 60.0};
  const VoxelResolution resolutions[] = {{12, 12, 30}, {8, 8, 8}, {16, 10, 40}};
  for (int trial = 0; trial < 100; ++trial) {
    const double radius = radii[rng.below(std::size(radii))];
    const VoxelResolution res = resolutions[rng.below(std::size(resolutions))];
    const BinaryVolume mask = random_mask(rng, 16, 0.02 + 0.08 * rng.real(), res);
    const BinaryVolume got = dilate(mask, radius);
    const BinaryVolume want = dilate_reference(mask, radius);
    REQUIRE(got.data == want.data);
  }
}

TEST_CASE("dilation by zero is the identity and dilation grows with radius") {
  Rng rng(20260403);
  const BinaryVolume mask = random_mask(rng, 16, 0.05);
  CHECK(dilate(mask, 0.0).data == mask.data);
  const BinaryVolume small = dilate(mask, 20.0);
  const BinaryVolume big = dilate(mask, 45.0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) CHECK(small[i] == 1);
    if (small[i]) CHECK(big[i] == 1);
  }
}

TEST_CASE("overlap counts match the nested-loop reference") {
  Rng rng(20260404);
  for (int trial = 0; trial < 100; ++trial) {
    const LabelVolume a = random_labels(rng, 16, 4);
    const LabelVolume b = random_labels(rng, 16, 4);
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> want;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] != 0 && b[i] != 0) ++want[{a[i], b[i]}];
    }
    REQUIRE(overlap_counts(a, b) == want);
  }
}

TEST_CASE("centroid matches the mean-and-round reference") {
  Rng rng(20260405);
  for (int trial = 0; trial < 100; ++trial) {
    LabelVolume v(16, 16, 16);
    int placed = 0;
    while (placed < 5) {  // ensure ID 1 exists
      const std::size_t i = rng.below(v.size());
      if (v[i] == 0) {
        v[i] = 1;
        ++placed;
      }
    }
    double sz = 0, sy = 0, sx = 0;
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] == 1) {
        const Coord c = v.coord_of(i);
        sz += c.z;
        sy += c.y;
        sx += c.x;
        ++n;
      }
    }
    const Coord want{static_cast<int>(std::floor(sz / n + 0.5)),
                     static_cast<int>(std::floor(sy / n + 0.5)),
                     static_cast<int>(std::floor(sx / n + 0.5))};
    REQUIRE(centroid(v, 1) == want);
  }
}

TEST_CASE("centroid rounds half up") {
  LabelVolume v(1, 1, 4);
  v.at(0, 0, 1) = 7;
  v.at(0, 0, 2) = 7;  // mean x = 1.5
  CHECK(centroid(v, 7) == Coord{0, 0, 2});
}

TEST_CASE("centroid of an absent ID is an error") {
  LabelVolume v(2, 2, 2);
  CHECK_ERROR_CODE(centroid(v, 3), "unknown label");
}

TEST_CASE("ball offsets enumerate exactly the in-radius lattice") {
  const VoxelResolution res{12, 12, 30};
  const double radius = 40.0;
  const auto got = ball_offsets(radius, res);

  std::vector<Coord> want;
  for (int z = -4; z <= 4; ++z) {
    for (int y = -8; y <= 8; ++y) {
      for (int x = -8; x <= 8; ++x) {
        const double d2 = z * res.dz * z * res.dz + y * res.dy * y * res.dy +
                          x * res.dx * x * res.dx;
        if (d2 <= radius * radius) want.push_back({z, y, x});
      }
    }
  }
  CHECK(got.size() == want.size());
  for (const Coord& c : want) {
    CHECK(std::find(got.begin(), got.end(), c) != got.end());
  }
  // sorted by squared distance, origin first
  CHECK(got.front() == Coord{0, 0, 0});
  const auto d2 = [&](const Coord& c) {
    return c.z * res.dz * c.z * res.dz + c.y * res.dy * c.y * res.dy +
           c.x * res.dx * c.x * res.dx;
  };
  for (std::size_t i = 1; i < got.size(); ++i) {
    CHECK(d2(got[i - 1]) <= d2(got[i]));
  }
}

TEST_CASE("patch extraction copies interior and pads the exterior") {
  ScalarVolume v(4, 6, 6);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(i);

  PatchSpec spec;
  spec.center = {2, 3, 3};
  spec.shape = {2, 4, 4};
  spec.pad_value = -1.0;
  const auto patch = extract_patch(v, spec);
  CHECK(patch.data.shape() == spec.shape);
  // even dims put the centre at index dim/2: offset = center - shape/2
  CHECK(patch.offset == Coord{1, 1, 1});
  for (int z = 0; z < 2; ++z) {
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 4; ++x) {
        CHECK(patch.data.at(z, y, x) == v.at(z + 1, y + 1, x + 1));
      }
    }
  }

  spec.center = {0, 0, 0};
  const auto padded = extract_patch(v, spec);
  CHECK(padded.offset == Coord{-1, -2, -2});
  CHECK(padded.data.at(0, 0, 0) == -1.0f);          // out of bounds
  CHECK(padded.data.at(1, 2, 2) == v.at(0, 0, 0));  // centre voxel
}

TEST_CASE("label patches pad with zero regardless of pad_value") {
  LabelVolume v(2, 2, 2);
  v.at(0, 0, 0) = 9;
  PatchSpec spec;
  spec.center = {0, 0, 0};
  spec.shape = {2, 2, 2};
  spec.pad_value = 5.0;
  const auto patch = extract_patch(v, spec);
  CHECK(patch.data.at(0, 0, 0) == 0);  // padded corner
  CHECK(patch.data.at(1, 1, 1) == 9);
}

TEST_CASE("bounding box and mask helpers") {
  LabelVolume v(4, 4, 4);
  v.at(1, 2, 3) = 5;
  v.at(2, 1, 1) = 5;
  v.at(3, 3, 3) = 8;
  const BinaryVolume m = mask_of(v, 5);
  const Box box = bounding_box(m);
  CHECK(box.lo == Coord{1, 1, 1});
  CHECK(box.hi == Coord{2, 2, 3});
  CHECK(centroid_of_mask(m) == Coord{2, 2, 2});

  const auto hist = label_histogram(v);
  CHECK(hist.at(5) == 2);
  CHECK(hist.at(8) == 1);
  CHECK(hist.count(0) == 0);

  BinaryVolume empty(2, 2, 2);
  CHECK(bounding_box(empty).empty());
}

TEST_CASE("volumes reject non-positive shapes") {
  CHECK_ERROR_CODE(ScalarVolume(0, 3, 3), "bad shape");
  CHECK_ERROR_CODE(LabelVolume(2, -1, 3), "bad shape");
}
