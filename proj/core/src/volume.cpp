#include "sypa/volume.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sypa {

namespace {

const Coord kSixNeighbors[6] = {{-1, 0, 0}, {1, 0, 0},  {0, -1, 0},
                                {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};

std::vector<Coord> neighbor_offsets(Connectivity c) {
  std::vector<Coord> out;
  if (c == Connectivity::six) {
    out.assign(std::begin(kSixNeighbors), std::end(kSixNeighbors));
    return out;
  }
  for (int dz = -1; dz <= 1; ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (dz || dy || dx) out.push_back({dz, dy, dx});
  return out;
}

template <class V, class T>
Patch<V> extract_patch_impl(const V& volume, const PatchSpec& spec, T pad) {
  const Coord& s = spec.shape;
  if (s.z <= 0 || s.y <= 0 || s.x <= 0) fail("bad patch shape", "patch dims must be positive");
  const Coord& c = spec.center;
  if (!volume.in_bounds(c.z, c.y, c.x)) {
    fail("center out of bounds",
         "patch center (" + std::to_string(c.z) + "," + std::to_string(c.y) + "," +
             std::to_string(c.x) + ") outside volume");
  }
  Patch<V> out;
  out.offset = {c.z - s.z / 2, c.y - s.y / 2, c.x - s.x / 2};
  out.data = V(s.z, s.y, s.x, volume.resolution, pad);
  for (int z = 0; z < s.z; ++z) {
    const int vz = z + out.offset.z;
    if (vz < 0 || vz >= volume.nz) continue;
    for (int y = 0; y < s.y; ++y) {
      const int vy = y + out.offset.y;
      if (vy < 0 || vy >= volume.ny) continue;
      const int x0 = std::max(0, -out.offset.x);
      const int x1 = std::min(s.x, volume.nx - out.offset.x);
      if (x0 >= x1) continue;
      std::memcpy(&out.data.at(z, y, x0), &volume.at(vz, vy, x0 + out.offset.x),
                  sizeof(T) * static_cast<std::size_t>(x1 - x0));
    }
  }
  return out;
}

}  // namespace

LabelVolume connected_components(const BinaryVolume& mask, Connectivity connectivity) {
  LabelVolume labels(mask.nz, mask.ny, mask.nx, mask.resolution, 0);
  const auto neighbors = neighbor_offsets(connectivity);
  std::uint32_t next_id = 0;
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i] || labels[i]) continue;
    ++next_id;
    labels[i] = next_id;
    stack.push_back(i);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      const Coord p = mask.coord_of(cur);
      for (const Coord& d : neighbors) {
        const int z = p.z + d.z, y = p.y + d.y, x = p.x + d.x;
        if (!mask.in_bounds(z, y, x)) continue;
        const std::size_t j = mask.index(z, y, x);
        if (mask[j] && !labels[j]) {
          labels[j] = next_id;
          stack.push_back(j);
        }
      }
    }
  }
  return labels;
}

std::vector<Coord> ball_offsets(double radius_nm, const VoxelResolution& res) {
  if (radius_nm < 0) fail("bad radius", "dilation radius must be non-negative");
  const int rz = static_cast<int>(std::floor(radius_nm / res.dz));
  const int ry = static_cast<int>(std::floor(radius_nm / res.dy));
  const int rx = static_cast<int>(std::floor(radius_nm / res.dx));
  const double r2 = radius_nm * radius_nm;
  std::vector<Coord> out;
  for (int dz = -rz; dz <= rz; ++dz)
    for (int dy = -ry; dy <= ry; ++dy)
      for (int dx = -rx; dx <= rx; ++dx) {
        const double d2 = dz * res.dz * dz * res.dz + dy * res.dy * dy * res.dy +
                          dx * res.dx * dx * res.dx;
        if (d2 <= r2) out.push_back({dz, dy, dx});
      }
  auto key = [&](const Coord& c) {
    const double d2 =
        c.z * res.dz * c.z * res.dz + c.y * res.dy * c.y * res.dy + c.x * res.dx * c.x * res.dx;
    return std::make_tuple(d2, c.z, c.y, c.x);
  };
  std::sort(out.begin(), out.end(), [&](const Coord& a, const Coord& b) { return key(a) < key(b); });
  return out;
}

BinaryVolume dilate(const BinaryVolume& mask, double radius_nm) {
  const auto offsets = ball_offsets(radius_nm, mask.resolution);
  BinaryVolume out(mask.nz, mask.ny, mask.nx, mask.resolution, 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const Coord p = mask.coord_of(i);
    for (const Coord& d : offsets) {
      const int z = p.z + d.z, y = p.y + d.y, x = p.x + d.x;
      if (mask.in_bounds(z, y, x)) out.at(z, y, x) = 1;
    }
  }
  return out;
}

Coord centroid(const LabelVolume& labels, std::uint32_t id) {
  std::uint64_t n = 0;
  double sz = 0, sy = 0, sx = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != id) continue;
    const Coord p = labels.coord_of(i);
    sz += p.z;
    sy += p.y;
    sx += p.x;
    ++n;
  }
  if (n == 0) fail("unknown label", "label " + std::to_string(id) + " absent from volume");
  auto round_half_up = [](double v) { return static_cast<int>(std::floor(v + 0.5)); };
  return {round_half_up(sz / n), round_half_up(sy / n), round_half_up(sx / n)};
}

Coord centroid_of_mask(const BinaryVolume& mask) {
  std::uint64_t n = 0;
  double sz = 0, sy = 0, sx = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const Coord p = mask.coord_of(i);
    sz += p.z;
    sy += p.y;
    sx += p.x;
    ++n;
  }
  if (n == 0) fail("empty cleft", "mask has no foreground voxels");
  auto round_half_up = [](double v) { return static_cast<int>(std::floor(v + 0.5)); };
  return {round_half_up(sz / n), round_half_up(sy / n), round_half_up(sx / n)};
}

std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> overlap_counts(
    const LabelVolume& a, const LabelVolume& b) {
  if (!same_shape(a, b)) fail("shape mismatch", "overlap_counts requires equal shapes");
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> counts;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) ++counts[{a[i], b[i]}];
  }
  return counts;
}

Patch<ScalarVolume> extract_patch(const ScalarVolume& volume, const PatchSpec& spec) {
  return extract_patch_impl(volume, spec, static_cast<float>(spec.pad_value));
}
Patch<BinaryVolume> extract_patch(const BinaryVolume& volume, const PatchSpec& spec) {
  return extract_patch_impl(volume, spec, static_cast<std::uint8_t>(0));
}
Patch<LabelVolume> extract_patch(const LabelVolume& volume, const PatchSpec& spec) {
  return extract_patch_impl(volume, spec, static_cast<std::uint32_t>(0));
}

BinaryVolume mask_of(const LabelVolume& labels, std::uint32_t id) {
  BinaryVolume out(labels.nz, labels.ny, labels.nx, labels.resolution, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] == id ? 1 : 0;
  return out;
}

std::map<std::uint32_t, std::uint64_t> label_histogram(const LabelVolume& labels) {
  std::map<std::uint32_t, std::uint64_t> hist;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) ++hist[labels[i]];
  }
  return hist;
}

Box bounding_box(const BinaryVolume& mask) {
  Box box;
  box.lo = {mask.nz, mask.ny, mask.nx};
  box.hi = {-1, -1, -1};
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const Coord p = mask.coord_of(i);
    box.lo.z = std::min(box.lo.z, p.z);
    box.lo.y = std::min(box.lo.y, p.y);
    box.lo.x = std::min(box.lo.x, p.x);
    box.hi.z = std::max(box.hi.z, p.z);
    box.hi.y = std::max(box.hi.y, p.y);
    box.hi.x = std::max(box.hi.x, p.x);
  }
  return box;
}

}  // namespace sypa
