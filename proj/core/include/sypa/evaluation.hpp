#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "sypa/edge.hpp"
#include "sypa/synthgen.hpp"
#include "sypa/volume.hpp"

namespace sypa {

// Edges keyed by cleft/instance ID plus a record of how they were produced.
struct EdgeGraph {
  std::map<std::uint32_t, SynapseEdge> edges;
  nlohmann::json provenance = nlohmann::json::object();
};

EdgeGraph truth_graph(const SyntheticWorld& world);
EdgeGraph truth_graph(const SyntheticWorld& world, const Slab& slab);

nlohmann::json edge_graph_to_json(const EdgeGraph& g);
EdgeGraph edge_graph_from_json(const nlohmann::json& j);
void save_edge_graph(const std::filesystem::path& path, const EdgeGraph& g);
EdgeGraph load_edge_graph(const std::filesystem::path& path);

// Fraction of clefts whose predicted partner sets match the truth exactly.
// Both graphs must be keyed by the same cleft IDs.
double assignment_accuracy(const EdgeGraph& pred, const EdgeGraph& truth);

// Max-overlap matching of predicted instances to true clefts. Each true cleft
// designates at most one prediction as its detection (greatest overlap, then
// smaller predicted ID); surplus overlapping predictions count as false
// positives downstream.
struct CleftMatch {
  std::map<std::uint32_t, std::uint32_t> pred_to_true;  // zero-overlap preds absent
  std::map<std::uint32_t, std::uint32_t> detection_of;  // true ID -> designated pred
  std::vector<std::uint32_t> tied_preds;                // best-overlap ties, flagged
};

CleftMatch match_clefts(const LabelVolume& pred_instances, const LabelVolume& true_instances);

// Edge-level precision/recall/F1: a true positive is a predicted edge whose
// instance is the designated detection of a true cleft and whose partner sets
// equal that cleft's truth.
struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t true_positives = 0;
  std::int64_t n_pred = 0;
  std::int64_t n_true = 0;
  bool empty_prediction = false;
};

Prf edge_prf(const EdgeGraph& pred, const EdgeGraph& truth, const CleftMatch& match);

nlohmann::json prf_to_json(const Prf& m);

// Hyperparameter grid, enumerated in declared order: theta (outer), min_size,
// dilation radius, tau (inner).
struct GridSpec {
  std::vector<double> theta;
  std::vector<std::int64_t> min_size;
  std::vector<double> radius_nm;
  std::vector<double> tau;
};

void to_json(nlohmann::json& j, const GridSpec& g);
void from_json(const nlohmann::json& j, GridSpec& g);

struct GridPoint {
  double theta = 0.0;
  std::int64_t min_size = 0;
  double radius_nm = 0.0;
  double tau = 0.0;
};

struct GridResult {
  GridPoint point;
  Prf validation;
};

struct GridReport {
  std::vector<GridResult> surface;   // full validation surface, declared order
  std::size_t selected = 0;          // index into surface
  Prf test;                          // selected point evaluated on the test split
};

// Evaluates every grid point on validation, selects the max F1 (first point
// on ties), then evaluates the winner once on test.
using GridEval = std::function<Prf(const GridPoint& point, bool test_split)>;
GridReport grid_search(const GridSpec& grid, const GridEval& evaluate);

nlohmann::json grid_report_to_json(const GridReport& report, const GridSpec& grid);

// Clefts where two assignment methods disagree on either side, with both
// answers retained for review.
struct Disagreement {
  std::uint32_t cleft_id = 0;
  SynapseEdge a;
  SynapseEdge b;
};

std::vector<Disagreement> disagreement_report(const EdgeGraph& a, const EdgeGraph& b);
nlohmann::json disagreements_to_json(const std::vector<Disagreement>& list);

// Precision-recall scatter with F1 level-set curves, written as SVG.
struct PrPoint {
  double precision = 0.0;
  double recall = 0.0;
  std::string label;
};

void pr_scatter(const std::vector<PrPoint>& points, const std::filesystem::path& svg_path);

}  // namespace sypa
