#pragma once

#include <filesystem>

#include "sypa/volume.hpp"

namespace sypa {

// On-disk volume container: a directory holding meta.json (shape, axis order
// "zyx", value kind, dtype, resolution in nm, byte order) and data.raw in
// C order with z slowest, little-endian. Round trips are bit-exact.
void save_volume(const std::filesystem::path& dir, const ScalarVolume& v);
void save_volume(const std::filesystem::path& dir, const BinaryVolume& v);
void save_volume(const std::filesystem::path& dir, const LabelVolume& v);

ScalarVolume load_scalar_volume(const std::filesystem::path& dir);
BinaryVolume load_binary_volume(const std::filesystem::path& dir);
LabelVolume load_label_volume(const std::filesystem::path& dir);

}  // namespace sypa
