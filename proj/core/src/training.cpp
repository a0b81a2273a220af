#include "bpinn/training.hpp"

#include <cmath>
#include <string>

#include "bpinn/errors.hpp"
#include "bpinn/rng.hpp"

namespace bpinn {

std::string_view optimizer_name(OptimizerKind k) { return k == OptimizerKind::Adam ? "adam" : "lbfgs"; }

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "adam") return OptimizerKind::Adam;
  if (name == "lbfgs" || name == "bfgs") return OptimizerKind::Lbfgs;
  throw ConfigError("unknown optimizer '" + std::string(name) + "' (expected adam or lbfgs)");
}

void TrainConfig::validate() const {
  // A zero threshold is accepted and means "run until max_epochs".
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) throw ConfigError("train.threshold must be >= 0");
  if (max_epochs < 1) throw ConfigError("train.max_epochs must be at least 1");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("train.validation_fraction must be in [0, 1)");
  }
  if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate must be positive");
  if (lbfgs_history < 1) throw ConfigError("train.lbfgs_history must be at least 1");
  if (!(0.0 < wolfe_c1 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0)) {
    throw ConfigError("train: line search needs 0 < wolfe_c1 < wolfe_c2 < 1");
  }
}

std::string_view train_status_name(TrainStatus s) {
  switch (s) {
    case TrainStatus::Converged: return "Converged";
    case TrainStatus::MaxEpochsReached: return "MaxEpochsReached";
    case TrainStatus::Diverged: return "Diverged";
    case TrainStatus::Stalled: return "Stalled";
  }
  return "Unknown";
}

TrainStatus parse_train_status(std::string_view name) {
  for (auto s : {TrainStatus::Converged, TrainStatus::MaxEpochsReached, TrainStatus::Diverged, TrainStatus::Stalled}) {
    if (train_status_name(s) == name) return s;
  }
  throw ConfigError("unknown training status '" + std::string(name) + "'");
}

namespace {

constexpr std::uint64_t kValidationStream = 0x5a11;

bool diverged(const ResidualBreakdown& b, double limit) { return !std::isfinite(b.r_total) || b.r_total > limit; }

}  // namespace

TrainResult train(const MLPArchitecture& arch, const ParameterVector& init, const CollocationSet& collocation,
                  const FlowParameters& flow, const ForcingProvider& forcing, const TrainConfig& config,
                  const EpochObserver& observer) {
  config.validate();
  check_parameters(arch, init.values());

  auto [train_set, val_set] = split_validation(collocation, config.validation_fraction,
                                               derive_seed(config.seed, kValidationStream));
  const LossProblem problem(train_set, flow, forcing, config.loss_spec());
  LossEngine engine(arch, problem);

  std::optional<LossProblem> val_problem;
  std::optional<LossEngine> val_engine;
  if (!val_set.domain_points.empty() && !val_set.boundary_points.empty()) {
    val_problem.emplace(val_set, flow, forcing, config.loss_spec());
    val_engine.emplace(arch, *val_problem);
  }

  TrainResult result;
  result.params = init;
  result.history.augmented = config.augmented;
  auto& history = result.history;

  // Returns true when training should stop at this epoch.
  auto record = [&](int epoch, const ResidualBreakdown& b, std::span<const double> params) {
    EpochRecord rec;
    rec.epoch = epoch;
    rec.breakdown = b;
    if (val_engine) rec.validation_total = val_engine->evaluate(params).r_total;
    history.records.push_back(rec);
    history.epochs_used = epoch;
    if (observer) observer(rec, params);
    if (diverged(b, config.divergence_limit)) {
      history.status = TrainStatus::Diverged;
      return true;
    }
    if (b.r_total <= config.threshold) {
      history.status = TrainStatus::Converged;
      return true;
    }
    if (epoch >= config.max_epochs) {
      history.status = TrainStatus::MaxEpochsReached;
      return true;
    }
    return false;
  };

  std::vector<double> grad(init.size());
  if (config.optimizer == OptimizerKind::Adam) {
    AdamState state(init.size());
    const AdamHyperparameters hp{config.learning_rate};
    for (int epoch = 1;; ++epoch) {
      const ResidualBreakdown b = engine.evaluate(result.params.values(), grad);
      if (record(epoch, b, result.params.values())) break;
      adam_step(result.params.values(), grad, state, epoch, hp);
    }
    result.adam_state = std::move(state);
    return result;
  }

  ResidualBreakdown last;
  const Objective objective = [&](std::span<const double> x, std::span<double> g) {
    last = engine.evaluate(x, g);
    return last.r_total;
  };
  LbfgsOptions opt;
  opt.history = config.lbfgs_history;
  opt.max_iterations = config.max_epochs;
  opt.gradient_tolerance = 0.0;
  opt.c1 = config.wolfe_c1;
  opt.c2 = config.wolfe_c2;
  bool stopped = false;
  const LbfgsCallback callback = [&](const LbfgsIterate& it) {
    stopped = record(it.iteration + 1, last, it.x);
    return !stopped;
  };
  const auto res = lbfgs_minimize(objective, std::vector<double>(init.values().begin(), init.values().end()), opt,
                                  callback);
  result.params = ParameterVector(res.x);
  if (!stopped) {
    switch (res.status) {
      case LbfgsStatus::LineSearchFailed:
        // The failure path re-evaluated the objective at the returned point.
        if (!record(history.epochs_used + 1, last, result.params.values())) history.status = TrainStatus::Stalled;
        break;
      case LbfgsStatus::NonFiniteObjective:
        history.records.push_back({history.epochs_used + 1, last, std::nullopt});
        history.epochs_used += 1;
        history.status = TrainStatus::Diverged;
        break;
      case LbfgsStatus::GradientConverged:
        history.status = TrainStatus::Stalled;
        break;
      default:
        history.status = TrainStatus::MaxEpochsReached;
        break;
    }
  }
  return result;
}

TrainConfig transfer_defaults(TrainConfig base) {
  base.optimizer = OptimizerKind::Lbfgs;
  return base;
}

TrainResult transfer_learn(const MLPArchitecture& checkpoint_arch, const ParameterVector& checkpoint_params,
                           const MLPArchitecture& target_arch, const CollocationSet& collocation,
                           const FlowParameters& flow, const ForcingProvider& forcing, TrainConfig config,
                           const EpochObserver& observer) {
  if (!(checkpoint_arch == target_arch)) {
    throw CheckpointError("checkpoint architecture " + checkpoint_arch.to_string() +
                          " does not match target architecture " + target_arch.to_string());
  }
  check_parameters(checkpoint_arch, checkpoint_params.values());
  if (config.max_epochs == 0) {
    TrainResult r;
    r.params = checkpoint_params;
    r.history.status = TrainStatus::MaxEpochsReached;
    r.history.epochs_used = 0;
    r.history.augmented = config.augmented;
    return r;
  }
  return train(target_arch, checkpoint_params, collocation, flow, forcing, config, observer);
}

}  // namespace bpinn
