#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpinn/checkpoint.hpp"
#include "bpinn/config.hpp"
#include "bpinn/evaluation.hpp"
#include "bpinn/io.hpp"
#include "bpinn/training.hpp"

namespace bpinn {

MLPArchitecture experiment_architecture(const ExperimentConfig& c);

/// Ladder level `level` of the nested datasets for this config's domain and
/// dataset seed (8 * 2^level domain points, 2^level per edge).
CollocationSet experiment_dataset(const ExperimentConfig& c, int level);

struct Assessment {
  ErrorReport report;
  double generalization_error = 0.0;
};

/// Error norms on the config's grid_n x grid_n test grid and the
/// generalization error on the same grid and its perimeter.
Assessment assess(const MLPArchitecture& arch, const ParameterVector& params, const ExperimentConfig& c);

struct RunOutcome {
  MLPArchitecture arch;
  CollocationSet dataset;
  TrainResult result;
  Assessment assessment;
};

/// Trains the configured architecture from init_parameters(arch, train.seed)
/// on ladder level dataset.level.
RunOutcome run_training(const ExperimentConfig& c, const EpochObserver& observer = {});

Checkpoint make_checkpoint(const RunOutcome& run, const ExperimentConfig& c);

using ProgressSink = std::function<void(const std::string&)>;

struct StudyCell {
  int level = 0;
  std::size_t domain_points = 0;
  std::size_t boundary_points = 0;
  double threshold = 0.0;
  TrainStatus status = TrainStatus::MaxEpochsReached;
  int epochs = 0;
  double r_total = 0.0;  // logged training error when the cell was taken
  double generalization_error = 0.0;
  ErrorReport report;

  std::size_t points() const { return domain_points + boundary_points; }
  bool converged() const { return status == TrainStatus::Converged; }
};

/// Threshold ladder x dataset ladder. Each level is trained once down to the
/// smallest threshold; the cell for a larger threshold is the state at the
/// first epoch whose r_total met it, which is exactly what a separate run
/// stopped at that threshold would produce. Unmet thresholds become N.C.
/// cells holding the final state.
std::vector<StudyCell> convergence_study(const ExperimentConfig& c, const ProgressSink& progress = {});

inline constexpr std::array<std::string_view, 4> kNormNames = {"w0_inf", "w1_inf", "w2_inf", "l2"};
double norm_value(const FieldErrors& e, std::string_view norm);

struct StudyFit {
  Field field = Field::U;
  std::string norm;
  AbscissaKind abscissa = AbscissaKind::TrainingError;
  /// The fixed quantity: the level for training-error fits, the threshold for
  /// collocation-count fits.
  double fixed = 0.0;
  ConvergenceFit fit;
};

/// Fits every (field, norm) against the training error at each level and
/// against the collocation count at each threshold, using converged cells
/// only. Groups with fewer than two usable cells are skipped.
std::vector<StudyFit> fit_study(std::span<const StudyCell> cells);

std::string study_table_csv(std::span<const StudyCell> cells, const Provenance& p);
nlohmann::json study_fits_json(std::span<const StudyFit> fits, const Provenance& p);

struct ArchitectureCell {
  std::string architecture;
  std::size_t parameters = 0;
  int level = 0;
  std::size_t points = 0;
  TrainStatus status = TrainStatus::MaxEpochsReached;
  int epochs = 0;
};

/// study.architectures x study.levels at train.threshold.
std::vector<ArchitectureCell> architecture_study(const ExperimentConfig& c, const ProgressSink& progress = {});

/// One row per architecture, one column per level (labelled by point count);
/// cells hold epochs-to-threshold or "N.C.".
std::string architecture_heatmap_csv(std::span<const ArchitectureCell> cells, const Provenance& p);

struct TransferOutcome {
  MLPArchitecture arch;
  CollocationSet dataset;
  TrainResult warm;
  Assessment warm_assessment;
  std::optional<TrainResult> cold;
  std::optional<Assessment> cold_assessment;
};

/// Continues training from the checkpoint on `target` (its domain, flow and
/// train settings). The optional cold baseline starts from
/// init_parameters(arch, target.train.seed) with the same settings.
TransferOutcome run_transfer(const Checkpoint& checkpoint, const ExperimentConfig& target, bool cold_baseline);

nlohmann::json transfer_summary_json(const TransferOutcome& t, const Provenance& p);

struct VerificationReport {
  double manufactured_residual_max = 0.0;  // largest squared residual, exact jets
  double gradient_max_relative_error = 0.0;
  double jet_first_max_relative_error = 0.0;
  double jet_second_max_relative_error = 0.0;

  bool passed() const;
};

/// Manufactured-solution and finite-difference checks of the residuals,
/// loss gradient and jets.
VerificationReport verify(std::uint64_t seed);

}  // namespace bpinn
