#include "sypa/cleft_detect.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "sypa/error.hpp"

namespace sypa {

namespace {

void validate(const DetectParams& p) {
  if (p.representation == CleftRepr::mask) {
    if (!(p.theta > 0.0) || !(p.theta < 1.0))
      fail("bad params", "mask threshold must lie in (0, 1)");
  } else {
    if (!(p.theta > 0.0) || !(p.theta <= 1.0))
      fail("bad params", "proximity threshold must lie in (0, 1]");
  }
  if (p.min_size < 0) fail("bad params", "minimum component size must be non-negative");
  if (p.tile.z < 1 || p.tile.y < 1 || p.tile.x < 1)
    fail("bad params", "tile extents must be positive");
  if (p.tile_step.z < 1 || p.tile_step.y < 1 || p.tile_step.x < 1)
    fail("bad params", "tile steps must be positive");
}

// Tile origins covering [0, n): multiples of the step, plus a final origin
// flush with the far edge.
std::vector<int> tile_starts(int n, int tile, int step) {
  std::vector<int> starts;
  for (int s = 0; s + tile <= n; s += step) starts.push_back(s);
  if (starts.empty() || starts.back() + tile < n) starts.push_back(n - tile);
  return starts;
}

}  // namespace

Tensor<float> NetVoxelPredictor::do_predict(const Tensor<float>& input) {
  const Tensor<float>& logits = net_->forward(input);
  if (logits.c != 1) fail("shape mismatch", "detector network must emit one channel");
  Tensor<float> out(1, logits.z, logits.y, logits.x);
  if (repr_ == CleftRepr::mask) {
    for (std::size_t i = 0; i < out.size(); ++i)
      out.data[i] = static_cast<float>(sigmoid(static_cast<double>(logits.data[i])));
  } else {
    for (std::size_t i = 0; i < out.size(); ++i)
      out.data[i] = static_cast<float>(std::tanh(static_cast<double>(logits.data[i])));
  }
  return out;
}

ScalarVolume predict_cleft_voxels(VoxelPredictor& predictor, const ScalarVolume& image,
                                  const DetectParams& params) {
  validate(params);
  const Coord tile = params.tile;
  if (image.nz < tile.z || image.ny < tile.y || image.nx < tile.x)
    fail("volume too small for patch", "image smaller than the inference tile");

  const auto zs = tile_starts(image.nz, tile.z, params.tile_step.z);
  const auto ys = tile_starts(image.ny, tile.y, params.tile_step.y);
  const auto xs = tile_starts(image.nx, tile.x, params.tile_step.x);

  std::vector<double> sum(image.size(), 0.0);
  std::vector<std::uint32_t> count(image.size(), 0);
  Tensor<float> input(1, tile.z, tile.y, tile.x);

  for (const int z0 : zs) {
    for (const int y0 : ys) {
      for (const int x0 : xs) {
        for (int z = 0; z < tile.z; ++z)
          for (int y = 0; y < tile.y; ++y) {
            const float* src = &image.data[image.index(z0 + z, y0 + y, x0)];
            float* dst = &input.data[input.index(0, z, y, 0)];
            std::copy(src, src + tile.x, dst);
          }
        const Tensor<float> pred = predictor.predict(input);
        if (pred.c != 1 || pred.z != tile.z || pred.y != tile.y || pred.x != tile.x)
          fail("shape mismatch", "detector prediction does not match the tile");
        for (int z = 0; z < tile.z; ++z)
          for (int y = 0; y < tile.y; ++y) {
            const std::size_t base = image.index(z0 + z, y0 + y, x0);
            const float* src = &pred.data[pred.index(0, z, y, 0)];
            for (int x = 0; x < tile.x; ++x) {
              sum[base + x] += static_cast<double>(src[x]);
              ++count[base + x];
            }
          }
      }
    }
  }

  ScalarVolume out(image.nz, image.ny, image.nx, image.resolution);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<float>(sum[i] / static_cast<double>(count[i]));
  return out;
}

LabelVolume cleft_instances(const ScalarVolume& prediction, const DetectParams& params) {
  validate(params);
  BinaryVolume fg(prediction.nz, prediction.ny, prediction.nx, prediction.resolution);
  if (params.representation == CleftRepr::mask) {
    for (std::size_t i = 0; i < fg.size(); ++i)
      fg[i] = static_cast<double>(prediction[i]) >= params.theta ? 1 : 0;
  } else {
    for (std::size_t i = 0; i < fg.size(); ++i)
      fg[i] = std::abs(static_cast<double>(prediction[i])) >= params.theta ? 1 : 0;
  }

  LabelVolume components = connected_components(fg, Connectivity::twenty_six);
  const auto sizes = label_histogram(components);
  std::map<std::uint32_t, std::uint32_t> remap;
  std::uint32_t next = 1;
  for (const auto& [id, n] : sizes) {
    if (static_cast<std::int64_t>(n) >= params.min_size) remap[id] = next++;
  }
  for (std::uint32_t& v : components.data) {
    if (v == 0) continue;
    const auto it = remap.find(v);
    v = it == remap.end() ? 0 : it->second;
  }
  return components;
}

}  // namespace sypa
