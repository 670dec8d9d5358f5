#include "config.hpp"

#include <fstream>

#include "sypa/error.hpp"

namespace sypa::cli {
namespace {

using nlohmann::json;

Coord coord_from(const json& j) {
  if (!j.is_array() || j.size() != 3) fail("bad params", "expected a [z, y, x] triple");
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>()};
}

json coord_to(const Coord& c) { return json::array({c.z, c.y, c.x}); }

template <class T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void merge_net(NetConfig& n, const json& j) {
  take(j, "width", n.width);
  take(j, "depth", n.depth);
  take(j, "seed", n.seed);
  // channel counts are owned by the role; silently ignore overrides
}

void merge_schedule(TrainSchedule& s, const json& j) {
  take(j, "iterations", s.iterations);
  take(j, "batch", s.batch);
  take(j, "log_every", s.log_every);
  take(j, "seed", s.seed);
  if (j.contains("lr_schedule")) {
    s.lr_schedule.clear();
    for (const auto& row : j.at("lr_schedule")) {
      if (!row.is_array() || row.size() != 2) {
        fail("bad params", "lr_schedule rows are [iteration, lr] pairs");
      }
      s.lr_schedule.emplace_back(row[0].get<std::int64_t>(), row[1].get<double>());
    }
  }
}

void merge_gen(GenParams& g, const json& j) {
  if (j.contains("shape")) g.shape = coord_from(j.at("shape"));
  take(j, "neurite_count", g.neurite_count);
  take(j, "radius_min_nm", g.radius_min_nm);
  take(j, "radius_max_nm", g.radius_max_nm);
  take(j, "synapse_count", g.synapse_count);
  take(j, "cleft_halo_nm", g.cleft_halo_nm);
  take(j, "vesicle_density", g.vesicle_density);
  take(j, "psd_darkening", g.psd_darkening);
  take(j, "noise_sigma", g.noise_sigma);
  take(j, "seed", g.seed);
  take(j, "polyadic_fraction", g.polyadic_fraction);
  take(j, "cleft_radius_nm", g.cleft_radius_nm);
  take(j, "vesicle_zone_nm", g.vesicle_zone_nm);
  take(j, "psd_zone_nm", g.psd_zone_nm);
  if (j.contains("resolution")) {
    const json& r = j.at("resolution");
    take(r, "dx", g.resolution.dx);
    take(r, "dy", g.resolution.dy);
    take(r, "dz", g.resolution.dz);
  }
}

void merge_assign(AssignParams& a, const json& j) {
  take(j, "dilation_radius_nm", a.dilation_radius_nm);
  if (j.contains("polyadic_tau")) {
    const json& t = j.at("polyadic_tau");
    a.polyadic_tau = t.is_null() ? std::nullopt : std::optional<double>(t.get<double>());
  }
  if (j.contains("patch")) a.patch.shape = coord_from(j.at("patch"));
}

CleftRepr repr_from(const std::string& name) {
  if (name == "mask") return CleftRepr::mask;
  if (name == "signed_proximity") return CleftRepr::signed_proximity;
  fail("bad params", "unknown representation: " + name);
}

std::string repr_name(CleftRepr r) {
  return r == CleftRepr::mask ? "mask" : "signed_proximity";
}

void merge_detect(DetectParams& d, const json& j) {
  if (j.contains("representation")) {
    d.representation = repr_from(j.at("representation").get<std::string>());
  }
  take(j, "theta", d.theta);
  take(j, "min_size", d.min_size);
  if (j.contains("tile")) d.tile = coord_from(j.at("tile"));
  if (j.contains("tile_step")) d.tile_step = coord_from(j.at("tile_step"));
}

void merge_grid(GridSpec& g, const json& j) {
  take(j, "theta", g.theta);
  take(j, "min_size", g.min_size);
  take(j, "radius_nm", g.radius_nm);
  take(j, "tau", g.tau);
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  return p.is_absolute() ? p : base / p;
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig c;

  const struct {
    const char* role;
    std::uint64_t net_seed;
    std::uint64_t train_seed;
    std::int64_t iterations;
  } defaults[] = {
      {"avan", 11, 101, 300},       {"mask_pruner", 12, 102, 160},
      {"prox_pruner", 13, 103, 160}, {"cleft_mask", 14, 104, 240},
      {"cleft_prox", 15, 105, 240},
  };
  for (const auto& d : defaults) {
    RoleSpec spec;
    spec.net.seed = d.net_seed;
    spec.schedule.iterations = d.iterations;
    spec.schedule.batch = 4;
    spec.schedule.lr_schedule = {{0, 1e-3}};
    spec.schedule.log_every = 10;
    spec.schedule.seed = d.train_seed;
    c.roles.emplace(d.role, spec);
  }

  c.grid.theta = {0.3, 0.45, 0.6, 0.75};
  c.grid.min_size = {0, 20};
  c.grid.radius_nm = {24.0, 36.0, 48.0};
  c.grid.tau = {0.5};
  return c;
}

ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir) {
  ExperimentConfig c = default_config();

  if (j.contains("paths")) {
    const json& p = j.at("paths");
    std::string data = "data", checkpoints = "checkpoints", reports = "reports";
    take(p, "data", data);
    take(p, "checkpoints", checkpoints);
    take(p, "reports", reports);
    c.data_dir = data;
    c.checkpoint_dir = checkpoints;
    c.report_dir = reports;
  }
  c.data_dir = resolve(base_dir, c.data_dir);
  c.checkpoint_dir = resolve(base_dir, c.checkpoint_dir);
  c.report_dir = resolve(base_dir, c.report_dir);

  take(j, "seed", c.seed);
  take(j, "worlds", c.worlds);
  if (c.worlds <= 0) fail("bad params", "worlds must be positive");
  if (j.contains("gen")) merge_gen(c.gen, j.at("gen"));

  if (j.contains("roles")) {
    for (const auto& [role, body] : j.at("roles").items()) {
      if (!known_role(role)) fail("bad params", "unknown role in config: " + role);
      RoleSpec& spec = c.roles.at(role);
      if (body.contains("net")) merge_net(spec.net, body.at("net"));
      if (body.contains("schedule")) merge_schedule(spec.schedule, body.at("schedule"));
      validate_schedule(spec.schedule);
    }
  }

  if (j.contains("assign")) merge_assign(c.assign, j.at("assign"));
  if (j.contains("detect")) merge_detect(c.detect, j.at("detect"));
  if (j.contains("grid")) merge_grid(c.grid, j.at("grid"));
  if (j.contains("proximity")) take(j.at("proximity"), "d_max_nm", c.proximity.d_max_nm);
  take(j, "eval_slab", c.eval_slab);
  named_slab(c.eval_slab, 64);  // validates the name
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) fail("io", "cannot read config: " + path.string());
  nlohmann::json j = nlohmann::json::parse(f, nullptr, false);
  if (j.is_discarded()) fail("bad params", "config is not valid JSON: " + path.string());
  return config_from_json(j, path.has_parent_path() ? path.parent_path() : ".");
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  json roles = json::object();
  for (const auto& [name, spec] : c.roles) {
    roles[name] = {{"net", spec.net}, {"schedule", spec.schedule}};
  }
  return json{
      {"paths",
       {{"data", c.data_dir.string()},
        {"checkpoints", c.checkpoint_dir.string()},
        {"reports", c.report_dir.string()}}},
      {"seed", c.seed},
      {"worlds", c.worlds},
      {"gen", c.gen},
      {"roles", roles},
      {"assign",
       {{"dilation_radius_nm", c.assign.dilation_radius_nm},
        {"polyadic_tau",
         c.assign.polyadic_tau ? json(*c.assign.polyadic_tau) : json(nullptr)},
        {"patch", coord_to(c.assign.patch.shape)}}},
      {"detect",
       {{"representation", repr_name(c.detect.representation)},
        {"theta", c.detect.theta},
        {"min_size", c.detect.min_size},
        {"tile", coord_to(c.detect.tile)},
        {"tile_step", coord_to(c.detect.tile_step)}}},
      {"grid",
       {{"theta", c.grid.theta},
        {"min_size", c.grid.min_size},
        {"radius_nm", c.grid.radius_nm},
        {"tau", c.grid.tau}}},
      {"proximity", {{"d_max_nm", c.proximity.d_max_nm}}},
      {"eval_slab", c.eval_slab},
  };
}

std::string config_hash(const ExperimentConfig& c) {
  const std::string bytes = config_to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json provenance(const ExperimentConfig& c) {
  return {{"config_hash", config_hash(c)}, {"seed", c.seed}, {"gen_seed", c.gen.seed}};
}

bool known_role(const std::string& role) {
  for (const auto& r : kRoles) {
    if (r == role) return true;
  }
  return false;
}

NetConfig role_net(const ExperimentConfig& c, const std::string& role) {
  if (!known_role(role)) fail("bad params", "unknown role: " + role);
  NetConfig n = c.roles.at(role).net;
  if (role == "avan") {
    n.in_channels = 2;
    n.out_channels = 2;
  } else if (role == "mask_pruner" || role == "prox_pruner") {
    n.in_channels = 4;
    n.out_channels = 1;
  } else {
    n.in_channels = 1;
    n.out_channels = 1;
  }
  return n;
}

LossKind role_loss(const std::string& role) {
  if (role == "avan" || role == "cleft_mask") return LossKind::dense_bce;
  if (role == "mask_pruner" || role == "prox_pruner") return LossKind::pooled_bce;
  if (role == "cleft_prox") return LossKind::signed_bce;
  fail("bad params", "unknown role: " + role);
}

std::filesystem::path world_dir(const ExperimentConfig& c, int world) {
  char name[32];
  std::snprintf(name, sizeof name, "world_%03d", world);
  return c.data_dir / name;
}

std::filesystem::path checkpoint_path(const ExperimentConfig& c, const std::string& role) {
  return c.checkpoint_dir / (role + ".ckpt");
}

std::filesystem::path loss_log_path(const ExperimentConfig& c, const std::string& role) {
  return c.checkpoint_dir / (role + "_loss.csv");
}

Slab named_slab(const std::string& name, int nz) {
  const SlabSplit s = slab_split(nz);
  if (name == "train") return s.train;
  if (name == "val") return s.val;
  if (name == "test") return s.test;
  if (name == "heldout") return {s.val.z0, s.test.z1};
  if (name == "all") return {0, nz};
  fail("bad params", "unknown slab name: " + name);
}

}  // namespace sypa::cli
