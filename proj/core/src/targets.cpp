#include "sypa/targets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sypa/error.hpp"

namespace sypa {

BinaryVolume cleft_mask_target(const SyntheticWorld& world) {
  const LabelVolume& c = world.cleft_labels;
  BinaryVolume mask(c.nz, c.ny, c.nx, c.resolution);
  for (std::size_t i = 0; i < c.data.size(); ++i) mask.data[i] = c.data[i] != 0 ? 1 : 0;
  return mask;
}

ScalarVolume signed_proximity_target(const SyntheticWorld& world,
                                     const SignedProximityParams& p) {
  if (!(p.d_max_nm > 0.0)) fail("bad params", "d_max must be positive");
  const LabelVolume& clefts = world.cleft_labels;
  const LabelVolume& seg = world.segmentation;
  const VoxelResolution res = clefts.resolution;
  ScalarVolume out(clefts.nz, clefts.ny, clefts.nx, res);

  const auto ball = ball_offsets(p.d_max_nm, res);
  auto offset_d2 = [&res](const Coord& o) {
    return o.z * res.dz * o.z * res.dz + o.y * res.dy * o.y * res.dy +
           o.x * res.dx * o.x * res.dx;
  };

  // Pass 1: nearest cleft voxel per voxel within the support radius.
  std::vector<float> best_d2(out.data.size(), std::numeric_limits<float>::infinity());
  std::vector<std::uint32_t> best_cleft(out.data.size(), 0);
  for (int z = 0; z < clefts.nz; ++z) {
    for (int y = 0; y < clefts.ny; ++y) {
      for (int x = 0; x < clefts.nx; ++x) {
        const std::uint32_t id = clefts.data[clefts.index(z, y, x)];
        if (id == 0) continue;
        for (const auto& o : ball) {
          const int z2 = z + o.z, y2 = y + o.y, x2 = x + o.x;
          if (!clefts.in_bounds(z2, y2, x2)) continue;
          const std::size_t t = clefts.index(z2, y2, x2);
          const float d2 = static_cast<float>(offset_d2(o));
          if (d2 < best_d2[t] || (d2 == best_d2[t] && id < best_cleft[t])) {
            best_d2[t] = d2;
            best_cleft[t] = id;
          }
        }
      }
    }
  }

  // Pass 2: magnitude from the ramp, sign from the owning cleft's partners.
  auto edge_of = [&](std::uint32_t cleft_id) { return world.find_edge(cleft_id); };
  for (int z = 0; z < out.nz; ++z) {
    for (int y = 0; y < out.ny; ++y) {
      for (int x = 0; x < out.nx; ++x) {
        const std::size_t i = out.index(z, y, x);
        if (best_cleft[i] == 0) continue;
        const SynapseEdge* e = edge_of(best_cleft[i]);
        if (e == nullptr) continue;  // cleft without an edge carries no direction
        const double mag = 1.0 - std::sqrt(static_cast<double>(best_d2[i])) / p.d_max_nm;
        if (mag <= 0.0) continue;

        int sign = 0;
        const std::uint32_t label = seg.data[i];
        auto in_pre = [&](std::uint32_t v) {
          return std::find(e->pre_ids.begin(), e->pre_ids.end(), v) != e->pre_ids.end();
        };
        auto in_post = [&](std::uint32_t v) {
          return std::find(e->post_ids.begin(), e->post_ids.end(), v) != e->post_ids.end();
        };
        if (label != 0) {
          sign = in_pre(label) ? +1 : (in_post(label) ? -1 : 0);
        } else {
          // Extracellular: sign of the nearer partner, ties -> 0.
          double d_pre = std::numeric_limits<double>::infinity();
          double d_post = d_pre;
          for (const auto& o : ball) {
            const int z2 = z + o.z, y2 = y + o.y, x2 = x + o.x;
            if (!seg.in_bounds(z2, y2, x2)) continue;
            const std::uint32_t v = seg.data[seg.index(z2, y2, x2)];
            if (v == 0) continue;
            if (std::isinf(d_pre) && in_pre(v)) d_pre = offset_d2(o);
            if (std::isinf(d_post) && in_post(v)) d_post = offset_d2(o);
            if (!std::isinf(d_pre) && !std::isinf(d_post)) break;
          }
          if (d_pre < d_post) sign = +1;
          if (d_post < d_pre) sign = -1;
        }
        out.data[i] = static_cast<float>(sign * mag);
      }
    }
  }
  return out;
}

PartnerMasks partner_mask_targets(const SyntheticWorld& world, std::uint32_t cleft_id,
                                  const PatchSpec& spec) {
  const SynapseEdge* e = world.find_edge(cleft_id);
  if (e == nullptr) fail("unknown label", "no true edge for cleft " + std::to_string(cleft_id));
  const Patch<LabelVolume> seg_patch = extract_patch(world.segmentation, spec);

  PartnerMasks m;
  m.offset = seg_patch.offset;
  m.pre = BinaryVolume(spec.shape.z, spec.shape.y, spec.shape.x,
                       world.segmentation.resolution);
  m.post = BinaryVolume(spec.shape.z, spec.shape.y, spec.shape.x,
                        world.segmentation.resolution);
  for (std::size_t i = 0; i < seg_patch.data.data.size(); ++i) {
    const std::uint32_t v = seg_patch.data.data[i];
    if (v == 0) continue;
    if (std::find(e->pre_ids.begin(), e->pre_ids.end(), v) != e->pre_ids.end())
      m.pre.data[i] = 1;
    if (std::find(e->post_ids.begin(), e->post_ids.end(), v) != e->post_ids.end())
      m.post.data[i] = 1;
  }
  return m;
}

}  // namespace sypa
