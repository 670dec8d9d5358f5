#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <vector>

#include "sypa/checkpoint.hpp"
#include "sypa/combined.hpp"
#include "sypa/error.hpp"
#include "sypa/samplers.hpp"
#include "sypa/volume_io.hpp"

namespace sypa::cli {
namespace {

using nlohmann::json;

void write_json(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path);
  if (!f) fail("io", "cannot write " + path.string());
  f << j.dump(2) << '\n';
  if (!f) fail("io", "write failed: " + path.string());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) fail("io", "cannot read " + path.string());
  json j = json::parse(f, nullptr, false);
  if (j.is_discarded()) fail("io", "not valid JSON: " + path.string());
  return j;
}

std::vector<WorldBundle> load_worlds(const ExperimentConfig& c) {
  std::vector<WorldBundle> worlds;
  worlds.reserve(c.worlds);
  for (int w = 0; w < c.worlds; ++w) {
    const auto dir = world_dir(c, w);
    if (!std::filesystem::exists(dir / "world.json")) {
      fail("io", "missing world " + dir.string() + "; run generate first");
    }
    worlds.push_back(load_world(dir));
  }
  return worlds;
}

std::vector<const WorldBundle*> world_ptrs(const std::vector<WorldBundle>& worlds) {
  std::vector<const WorldBundle*> ptrs;
  for (const auto& w : worlds) ptrs.push_back(&w);
  return ptrs;
}

std::unique_ptr<ExampleSampler> make_sampler(const ExperimentConfig& c,
                                             const std::string& role,
                                             const std::vector<const WorldBundle*>& worlds) {
  if (role == "avan") {
    return std::make_unique<AvanSampler>(worlds, c.assign.patch);
  }
  if (role == "mask_pruner" || role == "prox_pruner") {
    const CleftRepr repr =
        role == "mask_pruner" ? CleftRepr::mask : CleftRepr::signed_proximity;
    return std::make_unique<PrunerSampler>(worlds, c.assign.patch, repr,
                                           c.assign.dilation_radius_nm, c.proximity);
  }
  PatchSpec tile;
  tile.shape = c.detect.tile;
  const CleftRepr repr =
      role == "cleft_mask" ? CleftRepr::mask : CleftRepr::signed_proximity;
  return std::make_unique<DetectorSampler>(worlds, tile, repr, c.proximity);
}

UNet<float> load_role_net(const ExperimentConfig& c, const std::string& role) {
  UNet<float> net;
  const auto path = checkpoint_path(c, role);
  if (!std::filesystem::exists(path)) {
    fail("io", "missing checkpoint " + path.string() + "; run train --role " + role);
  }
  const CheckpointMeta meta = load_checkpoint(path, net);
  if (meta.role != role) {
    fail("bad checkpoint", "checkpoint role is '" + meta.role + "', expected '" + role + "'");
  }
  return net;
}

// Pair-classifier assignment over every instance, mirroring assign_all's
// flagged-empty-edge policy for instances that cannot form an edge.
EdgeGraph assign_all_by_pruner(PairScorer& scorer, const WorldBundle& bundle,
                               const LabelVolume& instances, const AssignParams& params,
                               const PrunerContext& ctx) {
  EdgeGraph graph;
  for (const auto& [id, count] : label_histogram(instances)) {
    (void)count;
    try {
      graph.edges.emplace(id, assign_by_pruner(scorer, bundle.image,
                                               bundle.world.segmentation, instances, id,
                                               params, ctx));
    } catch (const Error& e) {
      SynapseEdge edge;
      edge.cleft_id = id;
      edge.flags.push_back("assignment_failed:" + e.code());
      graph.edges.emplace(id, std::move(edge));
    }
  }
  return graph;
}

std::filesystem::path default_out(const ExperimentConfig& c, const std::string& stem) {
  return c.report_dir / (stem + ".json");
}

}  // namespace

void cmd_generate(const ExperimentConfig& c) {
  for (int w = 0; w < c.worlds; ++w) {
    GenParams g = c.gen;
    g.seed = c.gen.seed + static_cast<std::uint64_t>(w);
    WorldBundle bundle;
    bundle.world = generate_world(g);
    bundle.image = render_image(bundle.world, g);
    const auto dir = world_dir(c, w);
    save_world(dir, bundle);
    std::printf("world %d: %s  edges=%zu%s\n", w, dir.string().c_str(),
                bundle.world.true_edges.size(),
                bundle.world.underfilled ? "  (underfilled)" : "");
  }
}

void cmd_train(const ExperimentConfig& c, const std::string& role, bool resume) {
  if (!known_role(role)) fail("bad params", "unknown role: " + role);
  const std::vector<WorldBundle> worlds = load_worlds(c);
  const RoleSpec& spec = c.roles.at(role);

  UNet<float> net;
  AdamState adam;
  Rng rng(spec.schedule.seed);
  std::int64_t start = 0;
  const auto ckpt = checkpoint_path(c, role);
  if (resume) {
    const CheckpointMeta meta = load_checkpoint(ckpt, net);
    if (meta.role != role) {
      fail("bad checkpoint", "cannot resume: checkpoint role is '" + meta.role + "'");
    }
    adam = meta.adam;
    start = meta.iteration;
    if (meta.has_rng_state) rng.set_state(meta.rng_state);
  } else {
    net = build_network<float>(role_net(c, role));
  }

  auto sampler = make_sampler(c, role, world_ptrs(worlds));
  const TrainResult result =
      train(net, *sampler, spec.schedule, role_loss(role), adam, rng, start);

  CheckpointMeta meta;
  meta.config = net.config;
  meta.schedule = spec.schedule;
  meta.role = role;
  meta.iteration = start + spec.schedule.iterations;
  meta.adam = adam;
  meta.rng_state = rng.state();
  meta.has_rng_state = true;
  std::error_code ec;
  std::filesystem::create_directories(c.checkpoint_dir, ec);
  save_checkpoint(ckpt, net, meta);
  write_loss_log(loss_log_path(c, role), result.log, /*append=*/resume);

  std::printf("%s: %lld iterations (now at %lld), final loss %s, checkpoint %s\n",
              role.c_str(), static_cast<long long>(result.iterations_run),
              static_cast<long long>(meta.iteration),
              result.log.empty() ? "n/a" : std::to_string(result.log.back().loss).c_str(),
              ckpt.string().c_str());
}

void cmd_detect(const ExperimentConfig& c, int world) {
  const WorldBundle bundle = load_world(world_dir(c, world));
  const std::string role =
      c.detect.representation == CleftRepr::mask ? "cleft_mask" : "cleft_prox";
  UNet<float> net = load_role_net(c, role);
  NetVoxelPredictor predictor(net, c.detect.representation);

  const ScalarVolume prediction = predict_cleft_voxels(predictor, bundle.image, c.detect);
  const LabelVolume instances = cleft_instances(prediction, c.detect);
  save_volume(world_dir(c, world) / "prediction", prediction);
  save_volume(world_dir(c, world) / "instances", instances);

  const auto histogram = label_histogram(instances);
  json report{{"provenance", provenance(c)},
              {"world", world},
              {"detector", role},
              {"theta", c.detect.theta},
              {"min_size", c.detect.min_size},
              {"instances", histogram.size()},
              {"network_calls", predictor.calls()}};
  char stem[32];
  std::snprintf(stem, sizeof stem, "detect_world_%03d", world);
  const auto out = default_out(c, stem);
  write_json(out, report);
  std::printf("world %d: %zu instances, report %s\n", world, histogram.size(),
              out.string().c_str());
}

void cmd_assign(const ExperimentConfig& c, int world, const std::string& assigner,
                bool use_detected, const std::string& slab_name,
                std::filesystem::path out) {
  const WorldBundle bundle = load_world(world_dir(c, world));
  const std::string slab_key = slab_name.empty() ? c.eval_slab : slab_name;
  const Slab slab = named_slab(slab_key, bundle.image.nz);

  LabelVolume instances;
  if (use_detected) {
    const auto dir = world_dir(c, world) / "instances";
    if (!std::filesystem::exists(dir / "meta.json")) {
      fail("io", "missing detected instances in " + dir.string() + "; run detect first");
    }
    instances = filter_by_slab(load_label_volume(dir), slab);
  } else {
    instances = filter_by_slab(bundle.world.cleft_labels, slab);
  }

  EdgeGraph graph;
  UNet<float> net;  // must outlive the predictor
  if (assigner == "avan" || assigner == "oracle") {
    std::unique_ptr<PartnerPredictor> predictor;
    if (assigner == "avan") {
      net = load_role_net(c, "avan");
      predictor = std::make_unique<NetPartnerPredictor>(net);
    } else {
      predictor = std::make_unique<OraclePartnerPredictor>(bundle.world);
    }
    graph = assign_all(*predictor, bundle.image, bundle.world.segmentation, instances,
                       c.assign);
  } else if (assigner == "mask_pruner" || assigner == "prox_pruner" ||
             assigner == "oracle_pairs") {
    PrunerContext ctx;
    ScalarVolume prox;
    std::unique_ptr<PairScorer> scorer;
    if (assigner == "oracle_pairs") {
      scorer = std::make_unique<OraclePairScorer>(bundle.world);
    } else {
      net = load_role_net(c, assigner);
      scorer = std::make_unique<NetPairScorer>(net);
    }
    if (assigner == "prox_pruner") {
      ctx.repr = CleftRepr::signed_proximity;
      prox = signed_proximity_target(bundle.world, c.proximity);
      ctx.proximity = &prox;
    }
    graph = assign_all_by_pruner(*scorer, bundle, instances, c.assign, ctx);
  } else {
    fail("bad params", "unknown assigner: " + assigner);
  }

  graph.provenance = provenance(c);
  graph.provenance["world"] = world;
  graph.provenance["assigner"] = assigner;
  graph.provenance["slab"] = slab_key;
  graph.provenance["detected_instances"] = use_detected;

  if (out.empty()) {
    char stem[64];
    std::snprintf(stem, sizeof stem, "edges_world_%03d_%s_%s", world, assigner.c_str(),
                  slab_key.c_str());
    out = default_out(c, stem);
  }
  save_edge_graph(out, graph);
  std::printf("world %d: %zu edges by %s on %s slab -> %s\n", world, graph.edges.size(),
              assigner.c_str(), slab_key.c_str(), out.string().c_str());
}

void cmd_evaluate(const ExperimentConfig& c, int world, const std::filesystem::path& edges,
                  const std::filesystem::path& instances, const std::string& slab_name,
                  std::filesystem::path out) {
  const WorldBundle bundle = load_world(world_dir(c, world));
  const std::string slab_key = slab_name.empty() ? c.eval_slab : slab_name;
  const Slab slab = named_slab(slab_key, bundle.image.nz);
  const EdgeGraph pred = load_edge_graph(edges);
  const EdgeGraph truth = truth_graph(bundle.world, slab);

  json report{{"provenance", provenance(c)},
              {"world", world},
              {"slab", slab_key},
              {"edges", edges.string()}};
  std::string summary;
  if (instances.empty()) {
    const double accuracy = assignment_accuracy(pred, truth);
    report["mode"] = "accuracy";
    report["accuracy"] = accuracy;
    report["clefts"] = truth.edges.size();
    summary = "accuracy " + std::to_string(accuracy);
  } else {
    const LabelVolume inst = filter_by_slab(load_label_volume(instances), slab);
    const CleftMatch match =
        match_clefts(inst, filter_by_slab(bundle.world.cleft_labels, slab));
    const Prf prf = edge_prf(pred, truth, match);
    report["mode"] = "prf";
    report["prf"] = prf_to_json(prf);
    summary = "F1 " + std::to_string(prf.f1);
  }

  if (out.empty()) {
    char stem[64];
    std::snprintf(stem, sizeof stem, "evaluate_world_%03d_%s", world, slab_key.c_str());
    out = default_out(c, stem);
  }
  write_json(out, report);
  std::printf("world %d %s slab: %s -> %s\n", world, slab_key.c_str(), summary.c_str(),
              out.string().c_str());
}

void cmd_gridsearch(const ExperimentConfig& c, int world, std::filesystem::path out) {
  const WorldBundle bundle = load_world(world_dir(c, world));
  UNet<float> avan = load_role_net(c, "avan");
  const std::string detector_role =
      c.detect.representation == CleftRepr::mask ? "cleft_mask" : "cleft_prox";
  UNet<float> detector = load_role_net(c, detector_role);

  NetVoxelPredictor voxels(detector, c.detect.representation);
  NetPartnerPredictor partners(avan);
  CombinedSystem system(bundle, voxels, partners, c.detect, c.assign);

  const GridReport report = grid_search(
      c.grid, [&](const GridPoint& p, bool test) { return system.evaluate(p, test); });

  json j = grid_report_to_json(report, c.grid);
  j["provenance"] = provenance(c);
  j["world"] = world;
  j["detector"] = detector_role;

  if (out.empty()) {
    char stem[48];
    std::snprintf(stem, sizeof stem, "gridsearch_world_%03d", world);
    out = default_out(c, stem);
  }
  write_json(out, j);
  const GridPoint& best = report.surface[report.selected].point;
  std::printf(
      "world %d: %zu grid points, selected theta=%.3g min_size=%lld radius=%.3g tau=%.3g, "
      "test F1 %.4f -> %s\n",
      world, report.surface.size(), best.theta, static_cast<long long>(best.min_size),
      best.radius_nm, best.tau, report.test.f1, out.string().c_str());
}

void cmd_disagree(const ExperimentConfig& c, const std::filesystem::path& edges_a,
                  const std::filesystem::path& edges_b, std::filesystem::path out) {
  const EdgeGraph a = load_edge_graph(edges_a);
  const EdgeGraph b = load_edge_graph(edges_b);
  const auto list = disagreement_report(a, b);
  json report{{"provenance", provenance(c)},
              {"a", edges_a.string()},
              {"b", edges_b.string()},
              {"count", list.size()},
              {"disagreements", disagreements_to_json(list)}};
  if (out.empty()) out = default_out(c, "disagreements");
  write_json(out, report);
  std::printf("%zu disagreements -> %s\n", list.size(), out.string().c_str());
}

void cmd_plot(const ExperimentConfig& c, const std::filesystem::path& report,
              std::filesystem::path out) {
  const json j = read_json(report);
  std::vector<PrPoint> points;
  if (j.contains("points")) {
    for (const auto& p : j.at("points")) {
      points.push_back({p.at("precision").get<double>(), p.at("recall").get<double>(),
                        p.value("label", std::string())});
    }
  } else if (j.contains("surface")) {
    const std::size_t selected = j.value("selected_index", std::size_t{0});
    std::size_t i = 0;
    for (const auto& row : j.at("surface")) {
      const auto& v = row.at("validation");
      points.push_back({v.at("precision").get<double>(), v.at("recall").get<double>(),
                        i == selected ? "selected" : ""});
      ++i;
    }
    if (j.contains("test")) {
      points.push_back(
          {j.at("test").at("precision").get<double>(), j.at("test").at("recall").get<double>(),
           "test"});
    }
  } else {
    fail("bad params", "report has neither 'points' nor 'surface': " + report.string());
  }

  if (out.empty()) out = c.report_dir / "pr_scatter.svg";
  if (out.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(out.parent_path(), ec);
  }
  pr_scatter(points, out);
  std::printf("%zu points -> %s\n", points.size(), out.string().c_str());
}

}  // namespace sypa::cli
