#include "bpinn/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "bpinn/errors.hpp"
#include "bpinn/net.hpp"

namespace bpinn {

using nlohmann::json;

void ExperimentConfig::validate() const {
  (void)MLPArchitecture::parse(architecture);
  domain.validate();
  flow.validate();
  train.validate();
  if (dataset.level < 0 || dataset.level > 12) throw ConfigError("dataset.level must be in [0, 12]");
  for (int l : study.levels) {
    if (l < 0 || l > 12) throw ConfigError("study.levels entries must be in [0, 12]");
  }
  for (double t : study.thresholds) {
    if (!(t > 0.0)) throw ConfigError("study.thresholds entries must be positive");
  }
  for (const auto& a : study.architectures) (void)MLPArchitecture::parse(a);
  if (grid_n < 2) throw ConfigError("grid_n must be at least 2");
}

json to_json(const ExperimentConfig& c) {
  const TrainConfig& t = c.train;
  return json{
      {"preset", c.preset},
      {"architecture", c.architecture},
      {"domain", {{"x_min", c.domain.x_min}, {"x_max", c.domain.x_max}, {"y_min", c.domain.y_min},
                  {"y_max", c.domain.y_max}}},
      {"flow", {{"nu", c.flow.nu}, {"alpha", c.flow.alpha}, {"beta", c.flow.beta}, {"g", c.flow.g}}},
      {"train",
       {{"optimizer", std::string(optimizer_name(t.optimizer))},
        {"learning_rate", t.learning_rate},
        {"threshold", t.threshold},
        {"max_epochs", t.max_epochs},
        {"augmented", t.augmented},
        {"pressure_boundary", t.pressure_boundary},
        {"validation_fraction", t.validation_fraction},
        {"seed", t.seed},
        {"lbfgs_history", t.lbfgs_history},
        {"wolfe_c1", t.wolfe_c1},
        {"wolfe_c2", t.wolfe_c2},
        {"divergence_limit", t.divergence_limit}}},
      {"dataset", {{"level", c.dataset.level}, {"seed", c.dataset.seed}}},
      {"study",
       {{"thresholds", c.study.thresholds},
        {"levels", c.study.levels},
        {"architectures", c.study.architectures}}},
      {"grid_n", c.grid_n},
      {"output_dir", c.output_dir},
  };
}

namespace {

// Reads the members of one JSON object, rejecting keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError("config: '" + path_ + "' must be an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.push_back(key);
    const auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config: '" + qualified(key) + "' has the wrong type");
    }
  }

  const json* child(const char* key) {
    seen_.push_back(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string qualified(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [k, _] : obj_.items()) {
      if (std::find(seen_.begin(), seen_.end(), k) == seen_.end()) {
        throw ConfigError("config: unknown key '" + (path_.empty() ? k : path_ + "." + k) + "'");
      }
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::vector<std::string> seen_;
};

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  ObjectReader root(j, "");
  root.read("preset", c.preset);
  root.read("architecture", c.architecture);
  if (const json* d = root.child("domain")) {
    ObjectReader r(*d, "domain");
    r.read("x_min", c.domain.x_min);
    r.read("x_max", c.domain.x_max);
    r.read("y_min", c.domain.y_min);
    r.read("y_max", c.domain.y_max);
    r.finish();
  }
  if (const json* f = root.child("flow")) {
    ObjectReader r(*f, "flow");
    r.read("nu", c.flow.nu);
    r.read("alpha", c.flow.alpha);
    r.read("beta", c.flow.beta);
    r.read("g", c.flow.g);
    r.finish();
  }
  if (const json* t = root.child("train")) {
    ObjectReader r(*t, "train");
    std::string optimizer(optimizer_name(c.train.optimizer));
    r.read("optimizer", optimizer);
    c.train.optimizer = parse_optimizer(optimizer);
    r.read("learning_rate", c.train.learning_rate);
    r.read("threshold", c.train.threshold);
    r.read("max_epochs", c.train.max_epochs);
    r.read("augmented", c.train.augmented);
    r.read("pressure_boundary", c.train.pressure_boundary);
    r.read("validation_fraction", c.train.validation_fraction);
    r.read("seed", c.train.seed);
    r.read("lbfgs_history", c.train.lbfgs_history);
    r.read("wolfe_c1", c.train.wolfe_c1);
    r.read("wolfe_c2", c.train.wolfe_c2);
    r.read("divergence_limit", c.train.divergence_limit);
    r.finish();
  }
  if (const json* d = root.child("dataset")) {
    ObjectReader r(*d, "dataset");
    r.read("level", c.dataset.level);
    r.read("seed", c.dataset.seed);
    r.finish();
  }
  if (const json* s = root.child("study")) {
    ObjectReader r(*s, "study");
    r.read("thresholds", c.study.thresholds);
    r.read("levels", c.study.levels);
    r.read("architectures", c.study.architectures);
    r.finish();
  }
  root.read("grid_n", c.grid_n);
  root.read("output_dir", c.output_dir);
  root.finish();
  c.validate();
  return c;
}

json preset_json(const std::string& name) {
  ExperimentConfig c;
  c.preset = name;
  if (name == "desk") {
    // defaults
  } else if (name == "paper") {
    c.architecture = "2-128-128-4";
    c.train.threshold = 1e-4;
    c.train.max_epochs = 350000;
    c.dataset.level = 7;
    c.study.thresholds = {1e-1, 1e-2, 1e-3, 1e-4};
    c.study.levels = {0, 1, 2, 3, 4, 5, 6, 7};
  } else if (name == "half-domain") {
    c.domain = {0.0, 1.0, -1.0, 1.0};
    c.train = transfer_defaults(c.train);
  } else if (name == "re10") {
    c.flow.nu = 0.1;
    c.flow.g = {0.0, -9.8};
    c.train = transfer_defaults(c.train);
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected desk, paper, half-domain or re10)");
  }
  return to_json(c);
}

bool is_paper_scale(const ExperimentConfig& c) { return c.preset == "paper"; }

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' must look like key.path=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &doc;
  std::size_t pos = 0;
  for (;;) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (part.empty()) throw ConfigError("override '" + assignment + "' has an empty key component");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    json& next = (*node)[part];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) throw ConfigError("override '" + assignment + "': '" + part + "' is not an object");
    node = &next;
    pos = dot + 1;
  }
}

json resolve_config_json(const std::optional<std::filesystem::path>& file, std::span<const std::string> overrides,
                         const std::string& default_preset) {
  json user = json::object();
  if (file) {
    std::ifstream in(*file);
    if (!in) throw IoError("cannot open config file '" + file->string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    user = json::parse(ss.str(), nullptr, false);
    if (user.is_discarded() || !user.is_object()) {
      throw ConfigError("config file '" + file->string() + "' is not a JSON object");
    }
  }
  json over = json::object();
  for (const auto& o : overrides) apply_override(over, o);

  std::string preset = default_preset;
  if (over.contains("preset") && over["preset"].is_string()) {
    preset = over["preset"].get<std::string>();
  } else if (user.contains("preset") && user["preset"].is_string()) {
    preset = user["preset"].get<std::string>();
  }
  json doc = preset_json(preset);
  doc.merge_patch(user);
  doc.merge_patch(over);
  doc["preset"] = preset;
  return doc;
}

}  // namespace bpinn
