#include "bpinn/checkpoint.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>

#include "bpinn/errors.hpp"
#include "bpinn/io.hpp"

namespace bpinn {

using nlohmann::json;

std::string encode_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

double decode_double(const std::string& s) {
  if (s.empty()) throw CheckpointError("empty number in checkpoint");
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) {
    throw CheckpointError("malformed number '" + s + "' in checkpoint");
  }
  return x;
}

namespace {

json encode_vector(std::span<const double> xs) {
  json out = json::array();
  for (double x : xs) out.push_back(encode_double(x));
  return out;
}

std::vector<double> decode_vector(const json& j, const char* what) {
  if (!j.is_array()) throw CheckpointError(std::string("checkpoint field '") + what + "' must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_string()) throw CheckpointError(std::string("checkpoint field '") + what + "' must hold strings");
    out.push_back(decode_double(e.get<std::string>()));
  }
  return out;
}

const json& require(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw CheckpointError(std::string("checkpoint is missing '") + key + "'");
  return *it;
}

}  // namespace

std::string checkpoint_to_string(const Checkpoint& c) {
  check_parameters(c.architecture, c.params.values());
  json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["architecture"] = c.architecture.to_string();
  j["activation"] = std::string(activation_name(c.architecture.activation()));
  j["seed"] = c.seed;
  j["status"] = std::string(train_status_name(c.status));
  j["epochs_used"] = c.epochs_used;
  j["float_encoding"] = "hex";
  j["parameters"] = encode_vector(c.params.values());
  if (c.optimizer_state) {
    j["optimizer_state"] = {{"kind", "adam"},
                            {"step", c.optimizer_state->step},
                            {"m", encode_vector(c.optimizer_state->m)},
                            {"v", encode_vector(c.optimizer_state->v)}};
  }
  j["config"] = c.config;
  return j.dump(1) + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw CheckpointError("checkpoint is not a complete JSON object");
  try {
    const json& version = require(j, "format_version");
    if (!version.is_number_integer() || version.get<int>() != kCheckpointFormatVersion) {
      throw CheckpointVersionError("unsupported checkpoint format_version " + version.dump() + " (expected " +
                                   std::to_string(kCheckpointFormatVersion) + ")");
    }
    if (require(j, "float_encoding").get<std::string>() != "hex") {
      throw CheckpointError("unsupported float_encoding in checkpoint");
    }
    const auto activation = parse_activation(require(j, "activation").get<std::string>());
    MLPArchitecture parsed = MLPArchitecture::parse(require(j, "architecture").get<std::string>());
    const auto w = parsed.widths();
    Checkpoint c{MLPArchitecture(std::vector<int>(w.begin(), w.end()), activation), 0, ParameterVector{}, std::nullopt, json::object(),
                 TrainStatus::MaxEpochsReached, 0};
    c.seed = require(j, "seed").get<std::uint64_t>();
    c.status = parse_train_status(require(j, "status").get<std::string>());
    c.epochs_used = require(j, "epochs_used").get<int>();
    c.params = ParameterVector(decode_vector(require(j, "parameters"), "parameters"));
    if (c.params.size() != c.architecture.parameter_count()) {
      throw CheckpointError("checkpoint holds " + std::to_string(c.params.size()) + " parameters but " +
                            c.architecture.to_string() + " needs " +
                            std::to_string(c.architecture.parameter_count()));
    }
    if (const auto it = j.find("optimizer_state"); it != j.end()) {
      if (require(*it, "kind").get<std::string>() != "adam") throw CheckpointError("unknown optimizer_state kind");
      AdamState s(c.params.size());
      s.step = require(*it, "step").get<long long>();
      s.m = decode_vector(require(*it, "m"), "optimizer_state.m");
      s.v = decode_vector(require(*it, "v"), "optimizer_state.v");
      if (s.m.size() != c.params.size() || s.v.size() != c.params.size()) {
        throw CheckpointError("optimizer_state length does not match the parameters");
      }
      c.optimizer_state = std::move(s);
    }
    c.config = require(j, "config");
    return c;
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ArchitectureError& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ArgumentError& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  write_text_file(path, checkpoint_to_string(c));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return checkpoint_from_string(read_text_file(path)); }

}  // namespace bpinn
