#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bpinn/loss.hpp"
#include "bpinn/net.hpp"
#include "bpinn/optim.hpp"
#include "bpinn/physics.hpp"
#include "bpinn/sampling.hpp"

namespace bpinn {

enum class OptimizerKind { Adam, Lbfgs };

std::string_view optimizer_name(OptimizerKind k);
OptimizerKind parse_optimizer(std::string_view name);

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  double threshold = 1e-2;  // stop once the active total residual is <= threshold
  int max_epochs = 50000;
  bool augmented = true;
  bool pressure_boundary = false;
  double validation_fraction = 0.15;
  std::uint64_t seed = 1;
  int lbfgs_history = 20;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  double divergence_limit = 1e6;

  /// Throws ConfigError on a negative threshold, max_epochs < 1 or a fraction outside [0, 1).
  void validate() const;

  LossSpec loss_spec() const { return {augmented, pressure_boundary}; }
};

enum class TrainStatus {
  Converged,
  MaxEpochsReached,
  Diverged,
  /// The L-BFGS line search could not make progress before the threshold was
  /// met. Reported like MaxEpochsReached ("N.C.") in the studies.
  Stalled,
};

std::string_view train_status_name(TrainStatus s);
TrainStatus parse_train_status(std::string_view name);

struct EpochRecord {
  int epoch = 0;
  ResidualBreakdown breakdown;
  std::optional<double> validation_total;
};

struct TrainingHistory {
  std::vector<EpochRecord> records;
  TrainStatus status = TrainStatus::MaxEpochsReached;
  int epochs_used = 0;
  bool augmented = true;
};

/// Called once per epoch with the record and the parameters it was computed at.
using EpochObserver = std::function<void(const EpochRecord&, std::span<const double> params)>;

struct TrainResult {
  ParameterVector params;
  TrainingHistory history;
  /// Adam moments at exit; empty for L-BFGS runs.
  std::optional<AdamState> adam_state;
};

/// Minimizes the (augmented or bare) total residual over the training split
/// of `collocation`. Epoch k evaluates the loss at the current parameters,
/// stops with Converged if r_total <= threshold, otherwise takes one
/// optimizer step (one Adam update or one L-BFGS iteration). The validation
/// split is evaluated every epoch and never used for stopping.
TrainResult train(const MLPArchitecture& arch, const ParameterVector& init, const CollocationSet& collocation,
                  const FlowParameters& flow, const ForcingProvider& forcing, const TrainConfig& config,
                  const EpochObserver& observer = {});

/// train() warm-started from checkpoint parameters. Throws CheckpointError if
/// `checkpoint_arch` differs from `target_arch`. max_epochs == 0 returns the
/// checkpoint parameters untouched with an empty history.
TrainResult transfer_learn(const MLPArchitecture& checkpoint_arch, const ParameterVector& checkpoint_params,
                           const MLPArchitecture& target_arch, const CollocationSet& collocation,
                           const FlowParameters& flow, const ForcingProvider& forcing, TrainConfig config,
                           const EpochObserver& observer = {});

/// Default transfer configuration: L-BFGS, otherwise as `base`.
TrainConfig transfer_defaults(TrainConfig base);

}  // namespace bpinn
