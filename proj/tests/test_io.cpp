// Round-trip tests for every on-disk artifact: the volume container, edge
// graphs, checkpoints, and loss logs — plus the failure codes for missing or
// malformed files.
#include <cstdint>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "sypa/checkpoint.hpp"
#include "sypa/evaluation.hpp"
#include "sypa/net.hpp"
#include "sypa/rng.hpp"
#include "sypa/train.hpp"
#include "sypa/volume_io.hpp"
#include "test_support.hpp"

using namespace sypa;

namespace {

std::filesystem::path fresh_dir(const char* leaf) {
  const auto dir = std::filesystem::temp_directory_path() / "sypa_io_tests" / leaf;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("scalar volumes round trip bit-exactly") {
  const auto dir = fresh_dir("scalar");
  ScalarVolume v(3, 4, 5, VoxelResolution{8.0, 10.0, 40.0});
  Rng rng(7);
  for (float& x : v.data) x = static_cast<float>(rng.normal());
  save_volume(dir / "v", v);
  const ScalarVolume back = load_scalar_volume(dir / "v");
  CHECK(back.nz == 3);
  CHECK(back.ny == 4);
  CHECK(back.nx == 5);
  CHECK(back.resolution == v.resolution);
  CHECK(back.data == v.data);
}

TEST_CASE("binary and label volumes round trip") {
  const auto dir = fresh_dir("kinds");
  BinaryVolume b(2, 3, 4);
  for (std::size_t i = 0; i < b.data.size(); ++i) b.data[i] = i % 2;
  save_volume(dir / "b", b);
  CHECK(load_binary_volume(dir / "b").data == b.data);

  LabelVolume l(2, 3, 4);
  for (std::size_t i = 0; i < l.data.size(); ++i)
    l.data[i] = static_cast<std::uint32_t>(i * 977u);
  save_volume(dir / "l", l);
  CHECK(load_label_volume(dir / "l").data == l.data);
}

TEST_CASE("volume container metadata is self-describing") {
  const auto dir = fresh_dir("meta");
  save_volume(dir / "v", ScalarVolume(2, 3, 4));
  std::ifstream f(dir / "v" / "meta.json");
  REQUIRE(f.good());
  const nlohmann::json meta = nlohmann::json::parse(f);
  CHECK(meta.at("axis_order") == "zyx");
  CHECK(meta.at("byte_order") == "little");
  CHECK(meta.at("kind") == "scalar");
  CHECK(meta.at("dtype") == "f32");
  CHECK(meta.at("shape") == nlohmann::json({2, 3, 4}));
  CHECK(std::filesystem::file_size(dir / "v" / "data.raw") == 2 * 3 * 4 * sizeof(float));
}

TEST_CASE("volume container rejects wrong kinds and bad data") {
  const auto dir = fresh_dir("reject");
  save_volume(dir / "v", ScalarVolume(2, 3, 4));
  CHECK_ERROR_CODE(load_label_volume(dir / "v"), "bad container");
  CHECK_ERROR_CODE(load_binary_volume(dir / "v"), "bad container");
  CHECK_ERROR_CODE(load_scalar_volume(dir / "missing"), "io");

  // Truncated payload: the reader must notice the size mismatch.
  std::filesystem::resize_file(dir / "v" / "data.raw", 10);
  CHECK_ERROR_CODE(load_scalar_volume(dir / "v"), "bad container");
}

TEST_CASE("edge graphs round trip through JSON files") {
  const auto dir = fresh_dir("edges");
  EdgeGraph g;
  SynapseEdge e;
  e.cleft_id = 3;
  e.pre_ids = {5};
  e.post_ids = {2, 8};
  e.pre_scores = {{5, 0.875}};
  e.post_scores = {{2, 0.25}, {8, 0.75}};
  e.flags = {"fallback_post"};
  e.patch_center = Coord{4, 10, 12};
  g.edges[e.cleft_id] = e;
  g.provenance = {{"assigner", "test"}};

  // The writer creates missing parent directories on the way.
  const auto path = dir / "sub" / "edges.json";
  save_edge_graph(path, g);
  const EdgeGraph back = load_edge_graph(path);
  REQUIRE(back.edges.size() == 1);
  const SynapseEdge& r = back.edges.at(3);
  CHECK(r.pre_ids == e.pre_ids);
  CHECK(r.post_ids == e.post_ids);
  CHECK(r.pre_scores == e.pre_scores);
  CHECK(r.post_scores == e.post_scores);
  CHECK(r.flags == e.flags);
  CHECK(r.patch_center == e.patch_center);
  CHECK(back.provenance == g.provenance);

  CHECK_ERROR_CODE(load_edge_graph(dir / "nope.json"), "io");
  std::ofstream bad(dir / "bad.json");
  bad << "{not json";
  bad.close();
  CHECK_ERROR_CODE(load_edge_graph(dir / "bad.json"), "io");
}

TEST_CASE("checkpoints restore weights, moments, and metadata") {
  const auto dir = fresh_dir("ckpt");
  NetConfig cfg;
  cfg.in_channels = 2;
  cfg.out_channels = 1;
  cfg.width = 3;
  cfg.depth = 1;
  cfg.seed = 42;
  UNet<float> net = build_network<float>(cfg);

  // Scribble over every block so the round trip is non-trivial.
  Rng rng(9);
  for (ParamBlock<float>* p : net.params()) {
    for (float& x : p->w) x = static_cast<float>(rng.normal());
    for (float& x : p->m) x = static_cast<float>(rng.normal());
    for (float& x : p->v) x = static_cast<float>(rng.real());
  }

  CheckpointMeta meta;
  meta.config = cfg;
  meta.schedule.iterations = 50;
  meta.schedule.batch = 2;
  meta.schedule.lr_schedule = {{0, 1e-3}, {30, 1e-4}};
  meta.schedule.log_every = 5;
  meta.schedule.seed = 77;
  meta.role = "mask_pruner";
  meta.iteration = 50;
  meta.adam.t = 50;
  meta.rng_state = {1, 2, 3, 0xFFFFFFFFFFFFFFFFull};
  meta.has_rng_state = true;

  save_checkpoint(dir / "net.ckpt", net, meta);
  UNet<float> loaded;
  const CheckpointMeta back = load_checkpoint(dir / "net.ckpt", loaded);

  CHECK(back.role == "mask_pruner");
  CHECK(back.iteration == 50);
  CHECK(back.adam.t == 50);
  CHECK(back.adam.beta1 == meta.adam.beta1);
  CHECK(back.schedule.iterations == 50);
  CHECK(back.schedule.lr_schedule == meta.schedule.lr_schedule);
  CHECK(back.schedule.seed == 77);
  CHECK(back.has_rng_state);
  CHECK(back.rng_state == meta.rng_state);
  CHECK(back.config.width == 3);
  CHECK(back.config.depth == 1);

  const auto a = net.params();
  const auto b = loaded.params();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i]->name == b[i]->name);
    CHECK(a[i]->w == b[i]->w);
    CHECK(a[i]->m == b[i]->m);
    CHECK(a[i]->v == b[i]->v);
  }
}

TEST_CASE("checkpoint loading rejects foreign or truncated files") {
  const auto dir = fresh_dir("ckpt_bad");
  UNet<float> net;
  CHECK_ERROR_CODE(load_checkpoint(dir / "missing.ckpt", net), "io");

  std::ofstream f(dir / "foreign.ckpt", std::ios::binary);
  f << "{\"magic\":\"other\"}\n";
  f.close();
  CHECK_ERROR_CODE(load_checkpoint(dir / "foreign.ckpt", net), "bad checkpoint");

  // A valid header with the payload cut off mid-block.
  NetConfig cfg;
  cfg.width = 3;
  cfg.depth = 1;
  cfg.out_channels = 1;
  UNet<float> small = build_network<float>(cfg);
  save_checkpoint(dir / "trunc.ckpt", small, CheckpointMeta{cfg, {}, "avan"});
  const auto full = std::filesystem::file_size(dir / "trunc.ckpt");
  std::filesystem::resize_file(dir / "trunc.ckpt", full / 2);
  CHECK_ERROR_CODE(load_checkpoint(dir / "trunc.ckpt", net), "bad checkpoint");
}

TEST_CASE("loss logs round trip and append continuations") {
  const auto dir = fresh_dir("loss");
  const auto path = dir / "loss.csv";
  std::vector<LossLogRow> first{{10, 0.693, 1e-3}, {20, 0.41, 1e-3}};
  write_loss_log(path, first, false);
  std::vector<LossLogRow> more{{30, 0.25, 1e-4}};
  write_loss_log(path, more, true);

  const auto rows = read_loss_log(path);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].iteration == 10);
  CHECK(rows[0].loss == doctest::Approx(0.693));
  CHECK(rows[2].iteration == 30);
  CHECK(rows[2].lr == doctest::Approx(1e-4));

  // Exactly one header line regardless of how many appends happened.
  std::ifstream f(path);
  std::string line;
  int headers = 0;
  while (std::getline(f, line))
    if (line == "iteration,loss,lr") ++headers;
  CHECK(headers == 1);

  // Truncating rewrites; appending to nothing still writes a header.
  write_loss_log(path, first, false);
  CHECK(read_loss_log(path).size() == 2);
  write_loss_log(dir / "new.csv", more, true);
  CHECK(read_loss_log(dir / "new.csv").size() == 1);

  CHECK_ERROR_CODE(read_loss_log(dir / "missing.csv"), "io");
}
