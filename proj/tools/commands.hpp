#pragma once

#include <filesystem>
#include <string>

#include "config.hpp"

namespace sypa::cli {

// Each command reads/writes artifacts under the config's directories, prints
// a one-line human summary to stdout, and throws sypa::Error on failure.

void cmd_generate(const ExperimentConfig& c);
void cmd_train(const ExperimentConfig& c, const std::string& role, bool resume);
void cmd_detect(const ExperimentConfig& c, int world);
void cmd_assign(const ExperimentConfig& c, int world, const std::string& assigner,
                bool use_detected, const std::string& slab,
                std::filesystem::path out);
void cmd_evaluate(const ExperimentConfig& c, int world, const std::filesystem::path& edges,
                  const std::filesystem::path& instances, const std::string& slab,
                  std::filesystem::path out);
void cmd_gridsearch(const ExperimentConfig& c, int world, std::filesystem::path out);
void cmd_disagree(const ExperimentConfig& c, const std::filesystem::path& edges_a,
                  const std::filesystem::path& edges_b, std::filesystem::path out);
void cmd_plot(const ExperimentConfig& c, const std::filesystem::path& report,
              std::filesystem::path out);

}  // namespace sypa::cli
