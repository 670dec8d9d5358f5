#include "sypa/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sypa/error.hpp"

namespace sypa {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace {

std::string hex_u64(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex << v;
  return ss.str();
}

std::uint64_t parse_hex_u64(const std::string& s) {
  return std::stoull(s, nullptr, 16);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, UNet<float>& net,
                     const CheckpointMeta& meta) {
  nlohmann::json blocks = nlohmann::json::array();
  for (ParamBlock<float>* p : net.params())
    blocks.push_back({{"name", p->name}, {"count", p->w.size()}});
  nlohmann::json header{{"magic", "sypa-checkpoint"},
                        {"version", 1},
                        {"dtype", "f32"},
                        {"role", meta.role},
                        {"config", meta.config},
                        {"schedule", meta.schedule},
                        {"iteration", meta.iteration},
                        {"adam",
                         {{"beta1", meta.adam.beta1},
                          {"beta2", meta.adam.beta2},
                          {"eps", meta.adam.eps},
                          {"t", meta.adam.t}}},
                        {"blocks", blocks}};
  if (meta.has_rng_state) {
    nlohmann::json state = nlohmann::json::array();
    for (std::uint64_t v : meta.rng_state) state.push_back(hex_u64(v));
    header["rng_state"] = state;
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) fail("io", "cannot write checkpoint: " + path.string());
  f << header.dump() << '\n';
  for (ParamBlock<float>* p : net.params()) {
    const auto bytes = [&f](const std::vector<float>& v) {
      f.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(float)));
    };
    bytes(p->w);
    bytes(p->m);
    bytes(p->v);
  }
  if (!f) fail("io", "failed writing checkpoint: " + path.string());
}

CheckpointMeta load_checkpoint(const std::filesystem::path& path, UNet<float>& net) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail("io", "cannot read checkpoint: " + path.string());
  std::string header_line;
  if (!std::getline(f, header_line)) fail("io", "truncated checkpoint: " + path.string());
  nlohmann::json header = nlohmann::json::parse(header_line, nullptr, false);
  if (header.is_discarded() || header.value("magic", "") != "sypa-checkpoint")
    fail("bad checkpoint", "unrecognized checkpoint header: " + path.string());

  CheckpointMeta meta;
  meta.config = header.at("config").get<NetConfig>();
  meta.schedule = header.at("schedule").get<TrainSchedule>();
  meta.role = header.value("role", "");
  meta.iteration = header.at("iteration").get<std::int64_t>();
  const auto& adam = header.at("adam");
  meta.adam.beta1 = adam.at("beta1").get<double>();
  meta.adam.beta2 = adam.at("beta2").get<double>();
  meta.adam.eps = adam.at("eps").get<double>();
  meta.adam.t = adam.at("t").get<std::int64_t>();
  if (header.contains("rng_state")) {
    const auto& state = header.at("rng_state");
    for (int i = 0; i < 4; ++i)
      meta.rng_state[static_cast<std::size_t>(i)] =
          parse_hex_u64(state.at(i).get<std::string>());
    meta.has_rng_state = true;
  }

  net = build_network<float>(meta.config);
  const auto params = net.params();
  const auto& blocks = header.at("blocks");
  if (blocks.size() != params.size())
    fail("bad checkpoint", "parameter block count mismatch in " + path.string());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& b = blocks.at(i);
    if (b.at("name").get<std::string>() != params[i]->name ||
        b.at("count").get<std::size_t>() != params[i]->w.size())
      fail("bad checkpoint", "parameter block layout mismatch in " + path.string());
    const auto read = [&f, &path](std::vector<float>& v) {
      f.read(reinterpret_cast<char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(float)));
      if (!f) fail("bad checkpoint", "truncated parameter data in " + path.string());
    };
    read(params[i]->w);
    read(params[i]->m);
    read(params[i]->v);
  }
  return meta;
}

}  // namespace sypa
