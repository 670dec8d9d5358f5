#include "sypa/volume_io.hpp"

#include <bit>
#include <fstream>

#include "json.hpp"

namespace sypa {

static_assert(std::endian::native == std::endian::little,
              "volume container writes raw little-endian data");

namespace {

using nlohmann::json;

template <class V>
void write_container(const std::filesystem::path& dir, const V& v, const char* kind,
                     const char* dtype, std::size_t elem_size) {
  std::filesystem::create_directories(dir);
  json meta = {
      {"shape", {v.nz, v.ny, v.nx}},
      {"axis_order", "zyx"},
      {"kind", kind},
      {"dtype", dtype},
      {"resolution_nm", {{"dx", v.resolution.dx}, {"dy", v.resolution.dy}, {"dz", v.resolution.dz}}},
      {"byte_order", "little"},
  };
  {
    std::ofstream out(dir / "meta.json");
    if (!out) fail("io", "cannot write " + (dir / "meta.json").string());
    out << meta.dump(2) << "\n";
  }
  std::ofstream raw(dir / "data.raw", std::ios::binary);
  if (!raw) fail("io", "cannot write " + (dir / "data.raw").string());
  raw.write(reinterpret_cast<const char*>(v.data.data()),
            static_cast<std::streamsize>(v.data.size() * elem_size));
  if (!raw) fail("io", "short write to " + (dir / "data.raw").string());
}

json read_meta(const std::filesystem::path& dir, const char* expect_kind,
               const char* expect_dtype) {
  std::ifstream in(dir / "meta.json");
  if (!in) fail("io", "cannot read " + (dir / "meta.json").string());
  json meta = json::parse(in);
  if (meta.at("kind") != expect_kind || meta.at("dtype") != expect_dtype) {
    fail("bad container", "expected kind=" + std::string(expect_kind) + " dtype=" +
                              std::string(expect_dtype) + " in " + dir.string());
  }
  if (meta.at("axis_order") != "zyx" || meta.at("byte_order") != "little") {
    fail("bad container", "unsupported axis or byte order in " + dir.string());
  }
  return meta;
}

template <class V>
V read_container(const std::filesystem::path& dir, const char* kind, const char* dtype,
                 std::size_t elem_size) {
  const json meta = read_meta(dir, kind, dtype);
  const auto shape = meta.at("shape");
  VoxelResolution res;
  res.dx = meta.at("resolution_nm").at("dx").get<double>();
  res.dy = meta.at("resolution_nm").at("dy").get<double>();
  res.dz = meta.at("resolution_nm").at("dz").get<double>();
  V v(shape.at(0).get<int>(), shape.at(1).get<int>(), shape.at(2).get<int>(), res);
  std::ifstream raw(dir / "data.raw", std::ios::binary);
  if (!raw) fail("io", "cannot read " + (dir / "data.raw").string());
  raw.read(reinterpret_cast<char*>(v.data.data()),
           static_cast<std::streamsize>(v.data.size() * elem_size));
  if (raw.gcount() != static_cast<std::streamsize>(v.data.size() * elem_size)) {
    fail("bad container", "data.raw size mismatch in " + dir.string());
  }
  return v;
}

}  // namespace

void save_volume(const std::filesystem::path& dir, const ScalarVolume& v) {
  write_container(dir, v, "scalar", "f32", sizeof(float));
}
void save_volume(const std::filesystem::path& dir, const BinaryVolume& v) {
  write_container(dir, v, "binary", "u8", sizeof(std::uint8_t));
}
void save_volume(const std::filesystem::path& dir, const LabelVolume& v) {
  write_container(dir, v, "label", "u32", sizeof(std::uint32_t));
}

ScalarVolume load_scalar_volume(const std::filesystem::path& dir) {
  return read_container<ScalarVolume>(dir, "scalar", "f32", sizeof(float));
}
BinaryVolume load_binary_volume(const std::filesystem::path& dir) {
  return read_container<BinaryVolume>(dir, "binary", "u8", sizeof(std::uint8_t));
}
LabelVolume load_label_volume(const std::filesystem::path& dir) {
  return read_container<LabelVolume>(dir, "label", "u32", sizeof(std::uint32_t));
}

}  // namespace sypa
