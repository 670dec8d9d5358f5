#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "json.hpp"
#include "sypa/edge.hpp"
#include "sypa/volume.hpp"

namespace sypa {

// Parameters of the procedural EM-like world generator. Neurites are
// thickened random-walk tubes; synapses are placed at axon-dendrite
// interfaces; the renderer adds the directional cues (vesicles, PSD).
struct GenParams {
  Coord shape{64, 192, 192};
  int neurite_count = 36;
  double radius_min_nm = 30.0;
  double radius_max_nm = 90.0;
  int synapse_count = 120;
  double cleft_halo_nm = 36.0;
  double vesicle_density = 0.18;  // speckle centres per vesicle-zone voxel
  double psd_darkening = 0.75;    // fraction removed from membrane value
  double noise_sigma = 0.03;
  std::uint64_t seed = 1;
  double polyadic_fraction = 0.0;  // chance a synapse gets a second postsynaptic partner
  double cleft_radius_nm = 90.0;   // lateral cap on each cleft
  double vesicle_zone_nm = 140.0;
  double psd_zone_nm = 90.0;
  VoxelResolution resolution;
};

void to_json(nlohmann::json& j, const GenParams& p);
void from_json(const nlohmann::json& j, GenParams& p);

enum class NeuriteRole { axon, dendrite };

struct SyntheticWorld {
  LabelVolume segmentation;
  LabelVolume cleft_labels;
  std::vector<SynapseEdge> true_edges;  // ascending cleft_id; scores unset
  std::map<std::uint32_t, NeuriteRole> roles;
  GenParams params;
  bool underfilled = false;  // fewer synapses placed than requested

  const SynapseEdge* find_edge(std::uint32_t cleft_id) const;
};

struct WorldBundle {
  SyntheticWorld world;
  ScalarVolume image;
};

// Deterministic world synthesis. Throws "volume too small for patch" if the
// shape cannot contain one default attention window.
SyntheticWorld generate_world(const GenParams& params);

// Grayscale rendering in [0, 1]: dark membranes, vesicle speckles on the
// presynaptic side of each cleft, PSD darkening on the postsynaptic side,
// optional additive Gaussian noise. Deterministic given params.seed.
ScalarVolume render_image(const SyntheticWorld& world, const GenParams& params);

// Contiguous z-slab split, 50% / 25% / 25% of the z extent.
struct Slab {
  int z0 = 0;
  int z1 = 0;
  bool contains(int z) const { return z >= z0 && z < z1; }
  int extent() const { return z1 - z0; }
};

struct SlabSplit {
  Slab train, val, test;
};

SlabSplit slab_split(int nz);

// One-pass centroids of every nonzero ID.
std::map<std::uint32_t, Coord> all_centroids(const LabelVolume& labels);

// Cleft IDs whose centroid falls in the slab, ascending.
std::vector<std::uint32_t> clefts_in_slab(const SyntheticWorld& world, const Slab& slab);

void save_world(const std::filesystem::path& dir, const WorldBundle& bundle);
WorldBundle load_world(const std::filesystem::path& dir);

}  // namespace sypa
