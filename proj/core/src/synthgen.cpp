#include "sypa/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>
#include <set>

#include "sypa/error.hpp"
#include "sypa/rng.hpp"
#include "sypa/volume_io.hpp"

namespace sypa {

namespace {

constexpr std::uint32_t kContested = 0xFFFFFFFFu;

struct Vec3 {
  double z = 0.0, y = 0.0, x = 0.0;
};

double length(const Vec3& v) { return std::sqrt(v.z * v.z + v.y * v.y + v.x * v.x); }

Vec3 normalized(const Vec3& v) {
  const double n = length(v);
  if (n == 0.0) return Vec3{1.0, 0.0, 0.0};
  return Vec3{v.z / n, v.y / n, v.x / n};
}

// Physical squared distance between two voxel coordinates.
double dist2_nm(const Coord& a, const Coord& b, const VoxelResolution& res) {
  const double dz = (a.z - b.z) * res.dz;
  const double dy = (a.y - b.y) * res.dy;
  const double dx = (a.x - b.x) * res.dx;
  return dz * dz + dy * dy + dx * dx;
}

void validate(const GenParams& p) {
  if (p.shape.z < PatchSpec{}.shape.z || p.shape.y < PatchSpec{}.shape.y ||
      p.shape.x < PatchSpec{}.shape.x) {
    fail("volume too small for patch", "world shape cannot hold one attention window");
  }
  if (p.neurite_count < 1) fail("bad params", "neurite_count must be positive");
  if (p.synapse_count < 0) fail("bad params", "synapse_count must be non-negative");
  if (!(p.radius_min_nm > 0.0) || p.radius_max_nm < p.radius_min_nm)
    fail("bad params", "invalid neurite radius range");
  if (!(p.cleft_halo_nm > 0.0)) fail("bad params", "cleft_halo_nm must be positive");
  if (!(p.cleft_radius_nm > 0.0)) fail("bad params", "cleft_radius_nm must be positive");
  if (p.noise_sigma < 0.0) fail("bad params", "noise_sigma must be non-negative");
  if (p.vesicle_density < 0.0) fail("bad params", "vesicle_density must be non-negative");
  if (p.psd_darkening < 0.0 || p.psd_darkening > 1.0)
    fail("bad params", "psd_darkening must lie in [0, 1]");
  if (p.polyadic_fraction < 0.0 || p.polyadic_fraction > 1.0)
    fail("bad params", "polyadic_fraction must lie in [0, 1]");
}

// Stamp a physical-radius ball around a physical point into the claim volume.
void stamp_ball(LabelVolume& claim, const Vec3& centre_nm, double radius_nm,
                std::uint32_t id) {
  const VoxelResolution& res = claim.resolution;
  const int z0 = std::max(0, static_cast<int>(std::ceil((centre_nm.z - radius_nm) / res.dz)));
  const int z1 = std::min(claim.nz - 1,
                          static_cast<int>(std::floor((centre_nm.z + radius_nm) / res.dz)));
  const int y0 = std::max(0, static_cast<int>(std::ceil((centre_nm.y - radius_nm) / res.dy)));
  const int y1 = std::min(claim.ny - 1,
                          static_cast<int>(std::floor((centre_nm.y + radius_nm) / res.dy)));
  const int x0 = std::max(0, static_cast<int>(std::ceil((centre_nm.x - radius_nm) / res.dx)));
  const int x1 = std::min(claim.nx - 1,
                          static_cast<int>(std::floor((centre_nm.x + radius_nm) / res.dx)));
  const double r2 = radius_nm * radius_nm;
  for (int z = z0; z <= z1; ++z) {
    const double pz = z * res.dz - centre_nm.z;
    for (int y = y0; y <= y1; ++y) {
      const double py = y * res.dy - centre_nm.y;
      for (int x = x0; x <= x1; ++x) {
        const double px = x * res.dx - centre_nm.x;
        if (pz * pz + py * py + px * px > r2) continue;
        std::uint32_t& cell = claim.data[claim.index(z, y, x)];
        if (cell == 0 || cell == id) {
          cell = id;
        } else {
          cell = kContested;
        }
      }
    }
  }
}

}  // namespace

void to_json(nlohmann::json& j, const GenParams& p) {
  j = nlohmann::json{{"shape", {p.shape.z, p.shape.y, p.shape.x}},
                     {"neurite_count", p.neurite_count},
                     {"radius_min_nm", p.radius_min_nm},
                     {"radius_max_nm", p.radius_max_nm},
                     {"synapse_count", p.synapse_count},
                     {"cleft_halo_nm", p.cleft_halo_nm},
                     {"vesicle_density", p.vesicle_density},
                     {"psd_darkening", p.psd_darkening},
                     {"noise_sigma", p.noise_sigma},
                     {"seed", p.seed},
                     {"polyadic_fraction", p.polyadic_fraction},
                     {"cleft_radius_nm", p.cleft_radius_nm},
                     {"vesicle_zone_nm", p.vesicle_zone_nm},
                     {"psd_zone_nm", p.psd_zone_nm},
                     {"resolution_nm",
                      {{"dz", p.resolution.dz}, {"dy", p.resolution.dy}, {"dx", p.resolution.dx}}}};
}

void from_json(const nlohmann::json& j, GenParams& p) {
  const auto& s = j.at("shape");
  p.shape = Coord{s.at(0).get<int>(), s.at(1).get<int>(), s.at(2).get<int>()};
  p.neurite_count = j.at("neurite_count").get<int>();
  p.radius_min_nm = j.at("radius_min_nm").get<double>();
  p.radius_max_nm = j.at("radius_max_nm").get<double>();
  p.synapse_count = j.at("synapse_count").get<int>();
  p.cleft_halo_nm = j.at("cleft_halo_nm").get<double>();
  p.vesicle_density = j.at("vesicle_density").get<double>();
  p.psd_darkening = j.at("psd_darkening").get<double>();
  p.noise_sigma = j.at("noise_sigma").get<double>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.polyadic_fraction = j.value("polyadic_fraction", 0.0);
  p.cleft_radius_nm = j.value("cleft_radius_nm", 90.0);
  p.vesicle_zone_nm = j.value("vesicle_zone_nm", 140.0);
  p.psd_zone_nm = j.value("psd_zone_nm", 90.0);
  if (j.contains("resolution_nm")) {
    const auto& r = j.at("resolution_nm");
    p.resolution = VoxelResolution{r.at("dx").get<double>(), r.at("dy").get<double>(),
                                   r.at("dz").get<double>()};
  }
}

const SynapseEdge* SyntheticWorld::find_edge(std::uint32_t cleft_id) const {
  for (const SynapseEdge& e : true_edges)
    if (e.cleft_id == cleft_id) return &e;
  return nullptr;
}

SyntheticWorld generate_world(const GenParams& params) {
  validate(params);
  const VoxelResolution res = params.resolution;
  const Coord shape = params.shape;
  Rng rng(params.seed);

  SyntheticWorld world;
  world.params = params;

  // --- neurite roles and radii -------------------------------------------
  // Odd IDs are axon-like (thin), even IDs dendrite-like (thick).
  const double mid_r = 0.5 * (params.radius_min_nm + params.radius_max_nm);
  std::vector<double> radius(params.neurite_count + 1, 0.0);
  for (int id = 1; id <= params.neurite_count; ++id) {
    const bool axon = (id % 2) == 1;
    world.roles[static_cast<std::uint32_t>(id)] =
        axon ? NeuriteRole::axon : NeuriteRole::dendrite;
    radius[id] = axon ? rng.uniform(params.radius_min_nm, mid_r)
                      : rng.uniform(mid_r, params.radius_max_nm);
  }

  // --- rasterise thickened random walks ----------------------------------
  LabelVolume claim(shape.z, shape.y, shape.x, res);
  const Vec3 extent{(shape.z - 1) * res.dz, (shape.y - 1) * res.dy, (shape.x - 1) * res.dx};
  const double path_nm = 2.5 * (extent.z + extent.y + extent.x) / 3.0;
  const double step_nm = 36.0;
  const double sub_nm = 8.0;  // rasterisation stride, finer than any voxel edge

  for (int id = 1; id <= params.neurite_count; ++id) {
    const double r = radius[id];
    const Vec3 lo{std::min(r, 0.5 * extent.z), std::min(r, 0.5 * extent.y),
                  std::min(r, 0.5 * extent.x)};
    const Vec3 hi{extent.z - lo.z, extent.y - lo.y, extent.x - lo.x};
    Vec3 pos{rng.uniform(lo.z, hi.z), rng.uniform(lo.y, hi.y), rng.uniform(lo.x, hi.x)};
    Vec3 dir = normalized(Vec3{rng.normal(), rng.normal(), rng.normal()});
    double walked = 0.0;
    stamp_ball(claim, pos, r, static_cast<std::uint32_t>(id));
    while (walked < path_nm) {
      Vec3 next{pos.z + dir.z * step_nm, pos.y + dir.y * step_nm, pos.x + dir.x * step_nm};
      // Reflect off the walls so tubes stay inside the block.
      auto bounce = [](double& p, double& d, double l, double h) {
        if (p < l) {
          p = std::min(h, 2.0 * l - p);
          d = -d;
        } else if (p > h) {
          p = std::max(l, 2.0 * h - p);
          d = -d;
        }
      };
      bounce(next.z, dir.z, lo.z, hi.z);
      bounce(next.y, dir.y, lo.y, hi.y);
      bounce(next.x, dir.x, lo.x, hi.x);
      const Vec3 seg{next.z - pos.z, next.y - pos.y, next.x - pos.x};
      const double seg_len = length(seg);
      const int subs = std::max(1, static_cast<int>(std::ceil(seg_len / sub_nm)));
      for (int s = 1; s <= subs; ++s) {
        const double t = static_cast<double>(s) / subs;
        stamp_ball(claim,
                   Vec3{pos.z + seg.z * t, pos.y + seg.y * t, pos.x + seg.x * t}, r,
                   static_cast<std::uint32_t>(id));
      }
      pos = next;
      walked += step_nm;
      // Gentle direction jitter keeps tubes curvy but locally smooth.
      dir = normalized(Vec3{dir.z + 0.25 * rng.normal(), dir.y + 0.25 * rng.normal(),
                            dir.x + 0.25 * rng.normal()});
    }
  }

  // --- erode contacts so an extracellular film separates every pair ------
  LabelVolume seg(shape.z, shape.y, shape.x, res);
  for (int z = 0; z < shape.z; ++z) {
    for (int y = 0; y < shape.y; ++y) {
      for (int x = 0; x < shape.x; ++x) {
        const std::size_t i = claim.index(z, y, x);
        const std::uint32_t v = claim.data[i];
        if (v == 0 || v == kContested) continue;
        bool touches_other = false;
        static constexpr int N6[6][3] = {{-1, 0, 0}, {1, 0, 0},  {0, -1, 0},
                                         {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
        for (const auto& d : N6) {
          const int nz2 = z + d[0], ny2 = y + d[1], nx2 = x + d[2];
          if (!claim.in_bounds(nz2, ny2, nx2)) continue;
          const std::uint32_t w = claim.data[claim.index(nz2, ny2, nx2)];
          if (w != 0 && w != v && w != kContested) {
            touches_other = true;
            break;
          }
        }
        if (!touches_other) seg.data[i] = v;
      }
    }
  }
  world.segmentation = seg;

  // --- collect interface anchors per axon-dendrite pair ------------------
  const auto halo_ball = ball_offsets(params.cleft_halo_nm, res);
  auto labels_near = [&](const Coord& c) {
    // First (nearest) hit per label within the halo, in offset order.
    std::map<std::uint32_t, double> hit;
    for (const auto& o : halo_ball) {
      const int z = c.z + o.z, y = c.y + o.y, x = c.x + o.x;
      if (!seg.in_bounds(z, y, x)) continue;
      const std::uint32_t v = seg.data[seg.index(z, y, x)];
      if (v != 0 && !hit.count(v)) hit[v] = dist2_nm(c, Coord{z, y, x}, res);
    }
    return hit;
  };
  auto near_label = [&](const Coord& c, std::uint32_t want) {
    for (const auto& o : halo_ball) {
      const int z = c.z + o.z, y = c.y + o.y, x = c.x + o.x;
      if (!seg.in_bounds(z, y, x)) continue;
      if (seg.data[seg.index(z, y, x)] == want) return true;
    }
    return false;
  };

  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::size_t>> anchors;
  for (int z = 0; z < shape.z; ++z) {
    for (int y = 0; y < shape.y; ++y) {
      for (int x = 0; x < shape.x; ++x) {
        const std::size_t i = seg.index(z, y, x);
        if (seg.data[i] != 0) continue;
        bool film = false;
        static constexpr int N6[6][3] = {{-1, 0, 0}, {1, 0, 0},  {0, -1, 0},
                                         {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
        for (const auto& d : N6) {
          const int nz2 = z + d[0], ny2 = y + d[1], nx2 = x + d[2];
          if (!seg.in_bounds(nz2, ny2, nx2)) continue;
          if (seg.data[seg.index(nz2, ny2, nx2)] != 0) {
            film = true;
            break;
          }
        }
        if (!film) continue;
        const auto hit = labels_near(Coord{z, y, x});
        for (const auto& [a, da] : hit) {
          if (world.roles.at(a) != NeuriteRole::axon) continue;
          for (const auto& [d2, dd] : hit) {
            if (world.roles.at(d2) != NeuriteRole::dendrite) continue;
            anchors[{a, d2}].push_back(i);
          }
        }
      }
    }
  }

  // --- place synapses ------------------------------------------------------
  world.cleft_labels = LabelVolume(shape.z, shape.y, shape.x, res);
  LabelVolume& clefts = world.cleft_labels;
  const auto reach_ball = ball_offsets(params.cleft_radius_nm + params.cleft_halo_nm, res);
  std::vector<Coord> placed_anchor;
  const double exclusion_nm = 2.0 * params.cleft_radius_nm + 24.0;

  std::vector<std::pair<std::uint32_t, std::uint32_t>> pair_keys;
  for (const auto& [k, v] : anchors) pair_keys.push_back(k);
  rng.shuffle(pair_keys);

  std::uint32_t next_id = 1;
  std::size_t cursor = 0;
  while (static_cast<int>(world.true_edges.size()) < params.synapse_count &&
         !pair_keys.empty()) {
    cursor %= pair_keys.size();
    const auto key = pair_keys[cursor];
    auto& list = anchors[key];
    if (list.empty()) {
      pair_keys.erase(pair_keys.begin() + static_cast<std::ptrdiff_t>(cursor));
      continue;
    }
    const std::size_t pick = rng.below(list.size());
    const std::size_t anchor_idx = list[pick];
    list[pick] = list.back();
    list.pop_back();
    const Coord anchor = seg.coord_of(anchor_idx);

    bool excluded = false;
    for (const Coord& prev : placed_anchor) {
      if (dist2_nm(anchor, prev, res) < exclusion_nm * exclusion_nm) {
        excluded = true;
        break;
      }
    }
    if (excluded || clefts.data[anchor_idx] != 0) continue;

    const auto [pre, post] = key;
    // Optionally recruit a second postsynaptic dendrite. Anything within the
    // cleft's lateral reach is a candidate; the face check below rejects
    // partners the grown cleft cannot genuinely appose.
    std::uint32_t post2 = 0;
    if (params.polyadic_fraction > 0.0 && rng.real() < params.polyadic_fraction) {
      double best = 0.0;
      for (const Coord& o : reach_ball) {
        const int z = anchor.z + o.z, y = anchor.y + o.y, x = anchor.x + o.x;
        if (!seg.in_bounds(z, y, x)) continue;
        const std::uint32_t lbl = seg.data[seg.index(z, y, x)];
        if (lbl == 0 || lbl == post || world.roles.at(lbl) != NeuriteRole::dendrite)
          continue;
        const double d2 = dist2_nm(anchor, Coord{z, y, x}, res);
        if (post2 == 0 || d2 < best) {
          post2 = lbl;
          best = d2;
        }
      }
    }

    // Grow the cleft: 26-connected background film near both partners,
    // capped at cleft_radius_nm from the anchor.
    auto admissible = [&](const Coord& c, bool allow_second) {
      if (seg.data[seg.index(c.z, c.y, c.x)] != 0) return false;
      if (clefts.data[clefts.index(c.z, c.y, c.x)] != 0) return false;
      if (dist2_nm(c, anchor, res) > params.cleft_radius_nm * params.cleft_radius_nm)
        return false;
      if (!near_label(c, pre)) return false;
      if (near_label(c, post)) return true;
      return allow_second && post2 != 0 && near_label(c, post2);
    };

    auto grow = [&](bool allow_second) {
      std::vector<std::size_t> voxels;
      std::set<std::size_t> seen;
      std::deque<Coord> queue;
      if (!admissible(anchor, allow_second)) return voxels;
      queue.push_back(anchor);
      seen.insert(anchor_idx);
      while (!queue.empty()) {
        const Coord c = queue.front();
        queue.pop_front();
        voxels.push_back(seg.index(c.z, c.y, c.x));
        for (int dz = -1; dz <= 1; ++dz) {
          for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
              if (dz == 0 && dy == 0 && dx == 0) continue;
              const Coord n{c.z + dz, c.y + dy, c.x + dx};
              if (!seg.in_bounds(n.z, n.y, n.x)) continue;
              const std::size_t ni = seg.index(n.z, n.y, n.x);
              if (seen.count(ni) || !admissible(n, allow_second)) continue;
              seen.insert(ni);
              queue.push_back(n);
            }
          }
        }
      }
      return voxels;
    };

    std::vector<std::size_t> voxels = grow(post2 != 0);
    if (post2 != 0) {
      // A polyadic cleft must genuinely face both dendrites.
      int near2 = 0, near1 = 0;
      for (const std::size_t vi : voxels) {
        const Coord c = seg.coord_of(vi);
        if (near_label(c, post)) ++near1;
        if (near_label(c, post2)) ++near2;
      }
      if (near1 < 4 || near2 < 4) {
        post2 = 0;
        voxels = grow(false);
      }
    }
    if (voxels.size() < 6) continue;

    for (const std::size_t vi : voxels) clefts.data[vi] = next_id;
    SynapseEdge e;
    e.cleft_id = next_id;
    e.pre_ids = {pre};
    e.post_ids = {post};
    if (post2 != 0) {
      e.post_ids.push_back(post2);
      std::sort(e.post_ids.begin(), e.post_ids.end());
    }
    world.true_edges.push_back(e);
    placed_anchor.push_back(anchor);
    ++next_id;
    ++cursor;
  }

  world.underfilled = static_cast<int>(world.true_edges.size()) < params.synapse_count;
  return world;
}

ScalarVolume render_image(const SyntheticWorld& world, const GenParams& params) {
  const LabelVolume& seg = world.segmentation;
  const VoxelResolution res = seg.resolution;
  ScalarVolume img(seg.nz, seg.ny, seg.nx, res);

  constexpr float kInterior = 0.78f;
  constexpr float kMembrane = 0.22f;
  constexpr float kFarBackground = 0.55f;
  constexpr float kVesicle = 0.30f;

  // Base pass: membranes are segment voxels on a 6-boundary plus the
  // extracellular film voxels directly against a segment.
  std::vector<std::uint8_t> boundary(seg.data.size(), 0);
  static constexpr int N6[6][3] = {{-1, 0, 0}, {1, 0, 0},  {0, -1, 0},
                                   {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
  for (int z = 0; z < seg.nz; ++z) {
    for (int y = 0; y < seg.ny; ++y) {
      for (int x = 0; x < seg.nx; ++x) {
        const std::size_t i = seg.index(z, y, x);
        const std::uint32_t v = seg.data[i];
        bool memb = false;
        for (const auto& d : N6) {
          const int z2 = z + d[0], y2 = y + d[1], x2 = x + d[2];
          const std::uint32_t w =
              seg.in_bounds(z2, y2, x2) ? seg.data[seg.index(z2, y2, x2)] : v;
          if (w != v && (v != 0 || w != 0)) {
            memb = true;
            break;
          }
        }
        boundary[i] = memb ? 1 : 0;
        img.data[i] = memb ? kMembrane : (v != 0 ? kInterior : kFarBackground);
      }
    }
  }

  Rng rng(params.seed * 0x9E3779B97F4A7C15ull + 0x5851F42D4C957F2Dull);

  // Per-synapse cues, in edge order so the pass is deterministic.
  const auto psd_ball = ball_offsets(params.psd_zone_nm, res);
  const auto ves_ball = ball_offsets(params.vesicle_zone_nm, res);
  const float psd_value = kMembrane * static_cast<float>(1.0 - params.psd_darkening);
  std::vector<std::uint32_t> mark(seg.data.size(), 0);
  std::uint32_t epoch = 0;

  for (const SynapseEdge& e : world.true_edges) {
    std::vector<std::size_t> cleft_voxels;
    for (std::size_t i = 0; i < world.cleft_labels.data.size(); ++i)
      if (world.cleft_labels.data[i] == e.cleft_id) cleft_voxels.push_back(i);

    // Postsynaptic density: darken the postsynaptic membrane near the cleft,
    // thickened one voxel into the cytoplasm (PSDs are plates, not films —
    // the cue has to survive the anisotropic voxel grid).
    for (const std::size_t ci : cleft_voxels) {
      const Coord c = seg.coord_of(ci);
      for (const auto& o : psd_ball) {
        const int z = c.z + o.z, y = c.y + o.y, x = c.x + o.x;
        if (!seg.in_bounds(z, y, x)) continue;
        const std::size_t i = seg.index(z, y, x);
        const std::uint32_t v = seg.data[i];
        if (v == 0) continue;
        if (std::find(e.post_ids.begin(), e.post_ids.end(), v) == e.post_ids.end()) continue;
        bool plate = boundary[i];
        for (const auto& d : N6) {
          if (plate) break;
          const int z2 = z + d[0], y2 = y + d[1], x2 = x + d[2];
          if (!seg.in_bounds(z2, y2, x2)) continue;
          const std::size_t j = seg.index(z2, y2, x2);
          plate = boundary[j] && seg.data[j] == v;
        }
        if (plate) img.data[i] = psd_value;
      }
    }

    // Vesicle speckles in the presynaptic interior near the cleft.
    ++epoch;
    std::vector<std::size_t> zone;
    for (const std::size_t ci : cleft_voxels) {
      const Coord c = seg.coord_of(ci);
      for (const auto& o : ves_ball) {
        const int z = c.z + o.z, y = c.y + o.y, x = c.x + o.x;
        if (!seg.in_bounds(z, y, x)) continue;
        const std::size_t i = seg.index(z, y, x);
        if (mark[i] == epoch) continue;
        mark[i] = epoch;
        const std::uint32_t v = seg.data[i];
        if (!boundary[i] && v != 0 &&
            std::find(e.pre_ids.begin(), e.pre_ids.end(), v) != e.pre_ids.end())
          zone.push_back(i);
      }
    }
    std::sort(zone.begin(), zone.end());
    // Even the smallest bouton holds a few vesicles: never leave a non-empty
    // zone unspeckled.
    const std::size_t n_speckle =
        zone.empty() ? 0
                     : std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                                    params.vesicle_density * zone.size())));
    for (std::size_t k = 0; k < n_speckle && !zone.empty(); ++k) {
      const std::size_t i = zone[rng.below(zone.size())];
      img.data[i] = kVesicle;
      const Coord c = seg.coord_of(i);
      for (const auto& d : N6) {
        const int z = c.z + d[0], y = c.y + d[1], x = c.x + d[2];
        if (!seg.in_bounds(z, y, x)) continue;
        const std::size_t j = seg.index(z, y, x);
        if (!boundary[j] && seg.data[j] == seg.data[i]) img.data[j] = kVesicle;
      }
    }
  }

  if (params.noise_sigma > 0.0) {
    const float s = static_cast<float>(params.noise_sigma);
    for (float& v : img.data) {
      v = std::clamp(v + s * static_cast<float>(rng.normal()), 0.0f, 1.0f);
    }
  }
  return img;
}

SlabSplit slab_split(int nz) {
  if (nz < 4) fail("bad shape", "z extent too small to split");
  SlabSplit s;
  s.train = Slab{0, nz / 2};
  s.val = Slab{nz / 2, (3 * nz) / 4};
  s.test = Slab{(3 * nz) / 4, nz};
  return s;
}

std::map<std::uint32_t, Coord> all_centroids(const LabelVolume& labels) {
  struct Acc {
    double z = 0.0, y = 0.0, x = 0.0;
    std::size_t n = 0;
  };
  std::map<std::uint32_t, Acc> acc;
  for (int z = 0; z < labels.nz; ++z) {
    for (int y = 0; y < labels.ny; ++y) {
      for (int x = 0; x < labels.nx; ++x) {
        const std::uint32_t v = labels.data[labels.index(z, y, x)];
        if (v == 0) continue;
        Acc& a = acc[v];
        a.z += z;
        a.y += y;
        a.x += x;
        ++a.n;
      }
    }
  }
  std::map<std::uint32_t, Coord> out;
  for (const auto& [id, a] : acc) {
    const double n = static_cast<double>(a.n);
    out[id] = Coord{static_cast<int>(std::floor(a.z / n + 0.5)),
                    static_cast<int>(std::floor(a.y / n + 0.5)),
                    static_cast<int>(std::floor(a.x / n + 0.5))};
  }
  return out;
}

std::vector<std::uint32_t> clefts_in_slab(const SyntheticWorld& world, const Slab& slab) {
  std::vector<std::uint32_t> out;
  for (const auto& [id, c] : all_centroids(world.cleft_labels))
    if (slab.contains(c.z)) out.push_back(id);
  return out;
}

void save_world(const std::filesystem::path& dir, const WorldBundle& bundle) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail("io", "cannot create world directory: " + dir.string());
  save_volume(dir / "segmentation", bundle.world.segmentation);
  save_volume(dir / "clefts", bundle.world.cleft_labels);
  save_volume(dir / "image", bundle.image);

  nlohmann::json edges = nlohmann::json::array();
  for (const SynapseEdge& e : bundle.world.true_edges) edges.push_back(edge_to_json(e));
  {
    std::ofstream f(dir / "edges.json");
    if (!f) fail("io", "cannot write edges.json");
    f << nlohmann::json{{"edges", edges}}.dump(2) << '\n';
  }

  nlohmann::json roles = nlohmann::json::object();
  for (const auto& [id, role] : bundle.world.roles)
    roles[std::to_string(id)] = role == NeuriteRole::axon ? "axon" : "dendrite";
  const SlabSplit slabs = slab_split(bundle.world.segmentation.nz);
  nlohmann::json meta{{"params", bundle.world.params},
                      {"underfilled", bundle.world.underfilled},
                      {"roles", roles},
                      {"slabs",
                       {{"train", {slabs.train.z0, slabs.train.z1}},
                        {"val", {slabs.val.z0, slabs.val.z1}},
                        {"test", {slabs.test.z0, slabs.test.z1}}}},
                      {"clefts_by_slab",
                       {{"train", clefts_in_slab(bundle.world, slabs.train)},
                        {"val", clefts_in_slab(bundle.world, slabs.val)},
                        {"test", clefts_in_slab(bundle.world, slabs.test)}}}};
  std::ofstream f(dir / "world.json");
  if (!f) fail("io", "cannot write world.json");
  f << meta.dump(2) << '\n';
}

WorldBundle load_world(const std::filesystem::path& dir) {
  WorldBundle bundle;
  bundle.world.segmentation = load_label_volume(dir / "segmentation");
  bundle.world.cleft_labels = load_label_volume(dir / "clefts");
  bundle.image = load_scalar_volume(dir / "image");

  std::ifstream ef(dir / "edges.json");
  if (!ef) fail("io", "cannot read edges.json in " + dir.string());
  nlohmann::json edges = nlohmann::json::parse(ef, nullptr, false);
  if (edges.is_discarded()) fail("io", "edges.json is not valid JSON");
  for (const auto& je : edges.at("edges"))
    bundle.world.true_edges.push_back(edge_from_json(je));

  std::ifstream wf(dir / "world.json");
  if (!wf) fail("io", "cannot read world.json in " + dir.string());
  nlohmann::json meta = nlohmann::json::parse(wf, nullptr, false);
  if (meta.is_discarded()) fail("io", "world.json is not valid JSON");
  bundle.world.params = meta.at("params").get<GenParams>();
  bundle.world.underfilled = meta.at("underfilled").get<bool>();
  for (const auto& [key, val] : meta.at("roles").items()) {
    bundle.world.roles[static_cast<std::uint32_t>(std::stoul(key))] =
        val.get<std::string>() == "axon" ? NeuriteRole::axon : NeuriteRole::dendrite;
  }
  return bundle;
}

}  // namespace sypa
