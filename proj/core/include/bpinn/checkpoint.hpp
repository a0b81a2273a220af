#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "bpinn/net.hpp"
#include "bpinn/optim.hpp"
#include "bpinn/training.hpp"

namespace bpinn {

inline constexpr int kCheckpointFormatVersion = 1;

/// Trained parameters plus enough context to resume or transfer them.
/// Doubles are stored as C99 hexadecimal float strings ("%a"), so a
/// save/load cycle is bit-exact.
struct Checkpoint {
  MLPArchitecture architecture;
  std::uint64_t seed = 0;
  ParameterVector params;
  std::optional<AdamState> optimizer_state;
  nlohmann::json config = nlohmann::json::object();
  TrainStatus status = TrainStatus::MaxEpochsReached;
  int epochs_used = 0;
};

std::string encode_double(double x);
/// Throws CheckpointError on anything that is not a complete float literal.
double decode_double(const std::string& s);

std::string checkpoint_to_string(const Checkpoint& c);
Checkpoint checkpoint_from_string(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
/// Throws IoError when the file cannot be read, CheckpointVersionError on an
/// unknown format_version and CheckpointError on malformed content.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace bpinn
