#pragma once

#include <cstdint>
#include <cstring>
#include <map>
#include <utility>
#include <vector>

#include "sypa/error.hpp"

namespace sypa {

// Nanometres per voxel along each axis. The default matches the working
// resolution of the anisotropic EM volumes this pipeline targets.
struct VoxelResolution {
  double dx = 12.0;
  double dy = 12.0;
  double dz = 30.0;
};

inline bool operator==(const VoxelResolution& a, const VoxelResolution& b) {
  return a.dx == b.dx && a.dy == b.dy && a.dz == b.dz;
}

// Voxel coordinate or extent, axis order (z, y, x) throughout the project.
struct Coord {
  int z = 0;
  int y = 0;
  int x = 0;
};

inline bool operator==(const Coord& a, const Coord& b) {
  return a.z == b.z && a.y == b.y && a.x == b.x;
}
inline bool operator!=(const Coord& a, const Coord& b) { return !(a == b); }

template <class T>
struct VolumeBase {
  int nz = 0, ny = 0, nx = 0;
  VoxelResolution resolution;
  std::vector<T> data;

  VolumeBase() = default;
  VolumeBase(int nz_, int ny_, int nx_, VoxelResolution res = {}, T fill = T(0))
      : nz(nz_), ny(ny_), nx(nx_), resolution(res), data(checked_size(nz_, ny_, nx_), fill) {}

  static std::size_t checked_size(int nz_, int ny_, int nx_) {
    if (nz_ <= 0 || ny_ <= 0 || nx_ <= 0) fail("bad shape", "volume dimensions must be positive");
    return static_cast<std::size_t>(nz_) * ny_ * nx_;
  }

  std::size_t size() const { return data.size(); }
  std::size_t index(int z, int y, int x) const {
    return (static_cast<std::size_t>(z) * ny + y) * nx + x;
  }
  T& at(int z, int y, int x) { return data[index(z, y, x)]; }
  const T& at(int z, int y, int x) const { return data[index(z, y, x)]; }
  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }

  bool in_bounds(int z, int y, int x) const {
    return z >= 0 && z < nz && y >= 0 && y < ny && x >= 0 && x < nx;
  }
  Coord shape() const { return {nz, ny, nx}; }

  Coord coord_of(std::size_t i) const {
    const int x = static_cast<int>(i % nx);
    const int y = static_cast<int>((i / nx) % ny);
    const int z = static_cast<int>(i / (static_cast<std::size_t>(nx) * ny));
    return {z, y, x};
  }
};

// Real-valued voxels: EM images, network outputs, proximity targets.
struct ScalarVolume : VolumeBase<float> {
  using VolumeBase::VolumeBase;
};

// {0, 1} voxels.
struct BinaryVolume : VolumeBase<std::uint8_t> {
  using VolumeBase::VolumeBase;
};

// Non-negative integer IDs, 0 = background. IDs need not be contiguous.
struct LabelVolume : VolumeBase<std::uint32_t> {
  using VolumeBase::VolumeBase;
};

template <class A, class B>
bool same_shape(const A& a, const B& b) {
  return a.nz == b.nz && a.ny == b.ny && a.nx == b.nx;
}

// Attentional window geometry: a patch of `shape` voxels centred on `center`
// (for even dims the centre occupies index dim/2). Out-of-bounds voxels are
// filled with pad_value for scalar volumes and with 0 for masks and labels.
struct PatchSpec {
  Coord center;
  Coord shape{18, 80, 80};
  double pad_value = 0.0;
};

template <class V>
struct Patch {
  V data;        // exactly spec.shape
  Coord offset;  // volume coordinate of patch voxel (0, 0, 0); may be negative
};

enum class Connectivity { six = 6, twenty_six = 26 };

// Labels connected foreground regions 1..k; IDs are assigned in ascending
// order of each component's first voxel in (z, y, x) scan order.
LabelVolume connected_components(const BinaryVolume& mask, Connectivity connectivity);

// Physical-distance dilation: output voxel is foreground iff some input
// foreground voxel lies within Euclidean distance radius_nm, with axis steps
// scaled by the volume resolution.
BinaryVolume dilate(const BinaryVolume& mask, double radius_nm);

// Arithmetic mean of the voxel coordinates with the given ID, each axis
// rounded half-up. Throws "unknown label" if the ID is absent.
Coord centroid(const LabelVolume& labels, std::uint32_t id);

// Mean of foreground coordinates of a mask, rounded half-up.
Coord centroid_of_mask(const BinaryVolume& mask);

// Exact contingency table over nonzero ID pairs; absent pair means count 0.
std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> overlap_counts(
    const LabelVolume& a, const LabelVolume& b);

Patch<ScalarVolume> extract_patch(const ScalarVolume& volume, const PatchSpec& spec);
Patch<BinaryVolume> extract_patch(const BinaryVolume& volume, const PatchSpec& spec);
Patch<LabelVolume> extract_patch(const LabelVolume& volume, const PatchSpec& spec);

// --- shared helpers ---

BinaryVolume mask_of(const LabelVolume& labels, std::uint32_t id);

std::map<std::uint32_t, std::uint64_t> label_histogram(const LabelVolume& labels);

// All voxel offsets within physical distance radius_nm of the origin, sorted
// by (squared distance, z, y, x). Includes (0,0,0).
std::vector<Coord> ball_offsets(double radius_nm, const VoxelResolution& res);

// Inclusive voxel bounding box of a mask's foreground. Empty mask → lo > hi.
struct Box {
  Coord lo{0, 0, 0};
  Coord hi{-1, -1, -1};
  bool empty() const { return hi.z < lo.z; }
};
Box bounding_box(const BinaryVolume& mask);

}  // namespace sypa
