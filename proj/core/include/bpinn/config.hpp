#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpinn/physics.hpp"
#include "bpinn/training.hpp"

namespace bpinn {

struct DatasetConfig {
  int level = 5;  // index into the nested ladder: 8 * 2^level domain points
  std::uint64_t seed = 2023;
};

struct StudyConfig {
  std::vector<double> thresholds = {1e-1, 1e-2, 1e-3};
  std::vector<int> levels = {0, 1, 2, 3, 4, 5};
  std::vector<std::string> architectures = {"2-32-4", "2-64-4", "2-128-4", "2-32-32-4", "2-64-64-4", "2-128-128-4"};
};

/// Everything needed to reproduce one experiment. Serialized verbatim into
/// every output file.
struct ExperimentConfig {
  std::string preset = "desk";
  std::string architecture = "2-32-32-4";
  DomainSpec domain;
  FlowParameters flow;
  TrainConfig train;
  DatasetConfig dataset;
  StudyConfig study;
  int grid_n = 100;
  std::string output_dir = "out";

  /// Throws ConfigError (or ArchitectureError) when any part is invalid.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& c);

/// Strict conversion: unknown keys and wrong types raise ConfigError.
/// Missing keys keep their defaults.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Built-in presets: "desk", "paper", "half-domain", "re10".
nlohmann::json preset_json(const std::string& name);
bool is_paper_scale(const ExperimentConfig& c);

/// Applies "dotted.key=value" to a JSON document. The value is parsed as JSON
/// when possible and taken as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// preset (from the file's "preset" key, else `default_preset`) <- file <- overrides.
/// A missing file raises IoError naming the path.
nlohmann::json resolve_config_json(const std::optional<std::filesystem::path>& file,
                                   std::span<const std::string> overrides,
                                   const std::string& default_preset = "desk");

}  // namespace bpinn
