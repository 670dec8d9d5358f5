#include "sypa/evaluation.hpp"

#include <algorithm>
#include <fstream>

#include "sypa/error.hpp"

namespace sypa {

EdgeGraph truth_graph(const SyntheticWorld& world) {
  EdgeGraph g;
  g.provenance = {{"method", "ground_truth"}};
  for (const SynapseEdge& e : world.true_edges) g.edges[e.cleft_id] = e;
  return g;
}

EdgeGraph truth_graph(const SyntheticWorld& world, const Slab& slab) {
  const auto ids = clefts_in_slab(world, slab);
  EdgeGraph g;
  g.provenance = {{"method", "ground_truth"}, {"slab", {slab.z0, slab.z1}}};
  for (const std::uint32_t id : ids) {
    const SynapseEdge* e = world.find_edge(id);
    if (e != nullptr) g.edges[id] = *e;
  }
  return g;
}

nlohmann::json edge_graph_to_json(const EdgeGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [id, e] : g.edges) edges.push_back(edge_to_json(e));
  return nlohmann::json{{"edges", edges}, {"provenance", g.provenance}};
}

EdgeGraph edge_graph_from_json(const nlohmann::json& j) {
  EdgeGraph g;
  if (j.contains("provenance")) g.provenance = j.at("provenance");
  for (const auto& je : j.at("edges")) {
    SynapseEdge e = edge_from_json(je);
    g.edges[e.cleft_id] = e;
  }
  return g;
}

void save_edge_graph(const std::filesystem::path& path, const EdgeGraph& g) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path);
  if (!f) fail("io", "cannot write edge graph: " + path.string());
  f << edge_graph_to_json(g).dump(2) << '\n';
  if (!f) fail("io", "failed writing edge graph: " + path.string());
}

EdgeGraph load_edge_graph(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) fail("io", "cannot read edge graph: " + path.string());
  nlohmann::json j = nlohmann::json::parse(f, nullptr, false);
  if (j.is_discarded()) fail("io", "edge graph is not valid JSON: " + path.string());
  return edge_graph_from_json(j);
}

namespace {

void require_same_keys(const EdgeGraph& a, const EdgeGraph& b) {
  bool same = a.edges.size() == b.edges.size();
  if (same) {
    auto ia = a.edges.begin();
    auto ib = b.edges.begin();
    for (; ia != a.edges.end(); ++ia, ++ib)
      if (ia->first != ib->first) {
        same = false;
        break;
      }
  }
  if (!same) fail("key mismatch", "edge graphs are keyed by different cleft IDs");
}

}  // namespace

double assignment_accuracy(const EdgeGraph& pred, const EdgeGraph& truth) {
  require_same_keys(pred, truth);
  if (truth.edges.empty()) fail("key mismatch", "cannot score an empty edge set");
  std::int64_t correct = 0;
  for (const auto& [id, t] : truth.edges) {
    if (same_partners(pred.edges.at(id), t)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(truth.edges.size());
}

CleftMatch match_clefts(const LabelVolume& pred_instances,
                        const LabelVolume& true_instances) {
  if (!same_shape(pred_instances, true_instances))
    fail("shape mismatch", "instance maps have differing geometry");
  const auto table = overlap_counts(pred_instances, true_instances);

  // Best true cleft per prediction: max overlap, ties to the smaller true ID
  // (pairs iterate in ascending (pred, true) order, so the first max wins).
  CleftMatch match;
  std::map<std::uint32_t, std::uint64_t> best_count;
  std::map<std::uint32_t, int> at_max;
  for (const auto& [pair, n] : table) {
    const auto [p, t] = pair;
    auto it = match.pred_to_true.find(p);
    if (it == match.pred_to_true.end() || n > best_count[p]) {
      match.pred_to_true[p] = t;
      best_count[p] = n;
      at_max[p] = 1;
    } else if (n == best_count[p]) {
      ++at_max[p];
    }
  }
  for (const auto& [p, count] : at_max)
    if (count > 1) match.tied_preds.push_back(p);

  // Designated detection per true cleft: greatest overlap among its claiming
  // predictions, then the smaller predicted ID.
  std::map<std::uint32_t, std::uint64_t> det_count;
  for (const auto& [p, t] : match.pred_to_true) {
    const std::uint64_t n = best_count[p];
    auto it = match.detection_of.find(t);
    if (it == match.detection_of.end() || n > det_count[t]) {
      match.detection_of[t] = p;
      det_count[t] = n;
    }
  }
  return match;
}

Prf edge_prf(const EdgeGraph& pred, const EdgeGraph& truth, const CleftMatch& match) {
  Prf m;
  m.n_pred = static_cast<std::int64_t>(pred.edges.size());
  m.n_true = static_cast<std::int64_t>(truth.edges.size());
  for (const auto& [true_id, pred_id] : match.detection_of) {
    const auto pe = pred.edges.find(pred_id);
    const auto te = truth.edges.find(true_id);
    if (pe == pred.edges.end() || te == truth.edges.end()) continue;
    if (same_partners(pe->second, te->second)) ++m.true_positives;
  }
  if (m.n_pred == 0) {
    m.empty_prediction = true;
    m.precision = 0.0;
  } else {
    m.precision = static_cast<double>(m.true_positives) / static_cast<double>(m.n_pred);
  }
  m.recall = m.n_true == 0
                 ? 0.0
                 : static_cast<double>(m.true_positives) / static_cast<double>(m.n_true);
  m.f1 = (m.precision + m.recall) == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

nlohmann::json prf_to_json(const Prf& m) {
  nlohmann::json j{{"precision", m.precision}, {"recall", m.recall},
                   {"f1", m.f1},               {"true_positives", m.true_positives},
                   {"n_pred", m.n_pred},       {"n_true", m.n_true}};
  if (m.empty_prediction) j["empty_prediction"] = true;
  return j;
}

void to_json(nlohmann::json& j, const GridSpec& g) {
  j = nlohmann::json{{"theta", g.theta},
                     {"min_size", g.min_size},
                     {"radius_nm", g.radius_nm},
                     {"tau", g.tau}};
}

void from_json(const nlohmann::json& j, GridSpec& g) {
  g.theta = j.at("theta").get<std::vector<double>>();
  g.min_size = j.at("min_size").get<std::vector<std::int64_t>>();
  g.radius_nm = j.at("radius_nm").get<std::vector<double>>();
  g.tau = j.value("tau", std::vector<double>{0.5});
}

GridReport grid_search(const GridSpec& grid, const GridEval& evaluate) {
  if (grid.theta.empty() || grid.min_size.empty() || grid.radius_nm.empty() ||
      grid.tau.empty())
    fail("bad params", "every grid axis needs at least one value");
  GridReport report;
  for (const double theta : grid.theta) {
    for (const std::int64_t min_size : grid.min_size) {
      for (const double radius : grid.radius_nm) {
        for (const double tau : grid.tau) {
          GridResult r;
          r.point = GridPoint{theta, min_size, radius, tau};
          r.validation = evaluate(r.point, false);
          report.surface.push_back(r);
        }
      }
    }
  }
  for (std::size_t i = 1; i < report.surface.size(); ++i) {
    if (report.surface[i].validation.f1 > report.surface[report.selected].validation.f1)
      report.selected = i;
  }
  report.test = evaluate(report.surface[report.selected].point, true);
  return report;
}

nlohmann::json grid_report_to_json(const GridReport& report, const GridSpec& grid) {
  nlohmann::json surface = nlohmann::json::array();
  for (const GridResult& r : report.surface) {
    surface.push_back({{"theta", r.point.theta},
                       {"min_size", r.point.min_size},
                       {"radius_nm", r.point.radius_nm},
                       {"tau", r.point.tau},
                       {"validation", prf_to_json(r.validation)}});
  }
  const GridPoint& sel = report.surface[report.selected].point;
  return nlohmann::json{{"grid", grid},
                        {"surface", surface},
                        {"selected_index", report.selected},
                        {"selected",
                         {{"theta", sel.theta},
                          {"min_size", sel.min_size},
                          {"radius_nm", sel.radius_nm},
                          {"tau", sel.tau}}},
                        {"validation", prf_to_json(report.surface[report.selected].validation)},
                        {"test", prf_to_json(report.test)}};
}

std::vector<Disagreement> disagreement_report(const EdgeGraph& a, const EdgeGraph& b) {
  require_same_keys(a, b);
  std::vector<Disagreement> out;
  for (const auto& [id, ea] : a.edges) {
    const SynapseEdge& eb = b.edges.at(id);
    if (!same_partners(ea, eb)) out.push_back(Disagreement{id, ea, eb});
  }
  return out;
}

nlohmann::json disagreements_to_json(const std::vector<Disagreement>& list) {
  nlohmann::json j = nlohmann::json::array();
  for (const Disagreement& d : list) {
    j.push_back({{"cleft_id", d.cleft_id},
                 {"a", edge_to_json(d.a)},
                 {"b", edge_to_json(d.b)}});
  }
  return j;
}

}  // namespace sypa
