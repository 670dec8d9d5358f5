#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "json.hpp"
#include "sypa/error.hpp"

namespace {

void print_error(const std::string& code, const std::string& message) {
  nlohmann::json err{{"error", code}, {"message", message}};
  std::cerr << err.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synaptic partner assignment pipeline on synthetic volumes"};
  app.require_subcommand(1);

  std::string config_path = "config.json";
  app.add_option("-c,--config", config_path, "Experiment config (JSON)")
      ->capture_default_str();

  app.add_subcommand("generate", "Synthesize and persist the configured worlds");

  auto* train = app.add_subcommand("train", "Train one network role");
  std::string role;
  bool resume = false;
  train->add_option("--role", role, "avan | mask_pruner | prox_pruner | cleft_mask | cleft_prox")
      ->required();
  train->add_flag("--resume", resume, "Continue from the existing checkpoint");

  int world = 0;
  auto* detect = app.add_subcommand("detect", "Dense cleft prediction + instances");
  detect->add_option("--world", world, "World index")->capture_default_str();

  auto* assign = app.add_subcommand("assign", "Partner assignment over cleft instances");
  std::string assigner = "avan";
  std::string slab;
  bool use_detected = false;
  std::string out;
  assign->add_option("--world", world, "World index")->capture_default_str();
  assign->add_option("--assigner", assigner,
                     "avan | oracle | mask_pruner | prox_pruner | oracle_pairs")
      ->capture_default_str();
  assign->add_option("--slab", slab, "train | val | test | heldout | all (default: config)");
  assign->add_flag("--use-detected", use_detected, "Assign on detected instances, not truth");
  assign->add_option("--out", out, "Output edges path");

  auto* evaluate = app.add_subcommand("evaluate", "Score an edge list against world truth");
  std::string edges_path, instances_path;
  evaluate->add_option("--world", world, "World index")->capture_default_str();
  evaluate->add_option("--edges", edges_path, "Edge list (from assign)")->required();
  evaluate->add_option("--instances", instances_path,
                       "Instance volume directory; switches to detection F1 mode");
  evaluate->add_option("--slab", slab, "train | val | test | heldout | all (default: config)");
  evaluate->add_option("--out", out, "Report path");

  auto* gridsearch = app.add_subcommand("gridsearch", "Combined-system hyperparameter sweep");
  gridsearch->add_option("--world", world, "World index")->capture_default_str();
  gridsearch->add_option("--out", out, "Report path");

  auto* disagree = app.add_subcommand("disagree", "Clefts where two edge lists differ");
  std::string edges_a, edges_b;
  disagree->add_option("--a", edges_a, "First edge list")->required();
  disagree->add_option("--b", edges_b, "Second edge list")->required();
  disagree->add_option("--out", out, "Report path");

  auto* plot = app.add_subcommand("plot", "Precision-recall scatter SVG from a report");
  std::string report_path;
  plot->add_option("--report", report_path, "Grid report or {points: [...]} JSON")->required();
  plot->add_option("--out", out, "SVG path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return e.get_exit_code() == 0 ? 1 : e.get_exit_code();
  }

  try {
    const sypa::cli::ExperimentConfig config = sypa::cli::load_config(config_path);
    if (app.got_subcommand("generate")) {
      sypa::cli::cmd_generate(config);
    } else if (app.got_subcommand(train)) {
      sypa::cli::cmd_train(config, role, resume);
    } else if (app.got_subcommand(detect)) {
      sypa::cli::cmd_detect(config, world);
    } else if (app.got_subcommand(assign)) {
      sypa::cli::cmd_assign(config, world, assigner, use_detected, slab, out);
    } else if (app.got_subcommand(evaluate)) {
      sypa::cli::cmd_evaluate(config, world, edges_path, instances_path, slab, out);
    } else if (app.got_subcommand(gridsearch)) {
      sypa::cli::cmd_gridsearch(config, world, out);
    } else if (app.got_subcommand(disagree)) {
      sypa::cli::cmd_disagree(config, edges_a, edges_b, out);
    } else if (app.got_subcommand(plot)) {
      sypa::cli::cmd_plot(config, report_path, out);
    }
  } catch (const sypa::Error& e) {
    print_error(e.code(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
