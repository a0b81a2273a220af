#pragma once

#include <array>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "bpinn/loss.hpp"
#include "bpinn/net.hpp"
#include "bpinn/physics.hpp"
#include "bpinn/sampling.hpp"

namespace bpinn {

/// Anything that yields second-order jets of the four fields at a point:
/// a trained network, the analytic solution, or a synthetic perturbation.
using JetFunction = std::function<FieldJet2(Point2)>;

JetFunction network_jets(const MLPArchitecture& arch, const ParameterVector& params);
JetFunction beltrami_jets();

/// Per-field values indexed by Field.
using PerField = std::array<double, 4>;

/// Discrete W^{k,inf} error: for each field the max over orders m <= k, over
/// multi-indices |alpha| = m and over grid points of |D^alpha(exact - predicted)|.
/// k must be 0, 1 or 2.
PerField sobolev_error(const JetFunction& predicted, const JetFunction& exact, std::span<const Point2> grid, int k);
PerField sobolev_error(const MLPArchitecture& arch, const ParameterVector& params, std::span<const Point2> grid,
                       int k);

/// Root-mean-square pointwise error per field over the grid.
PerField l2_error(const JetFunction& predicted, const JetFunction& exact, std::span<const Point2> grid);
PerField l2_error(const MLPArchitecture& arch, const ParameterVector& params, std::span<const Point2> grid);

struct FieldErrors {
  double w0_inf = 0.0;
  double w1_inf = 0.0;
  double w2_inf = 0.0;
  double l2 = 0.0;
};

struct ErrorReport {
  std::array<FieldErrors, 4> fields{};
  std::size_t grid_points = 0;
  int n_per_side = 0;
  DomainSpec domain;

  const FieldErrors& operator[](Field f) const { return fields[static_cast<std::size_t>(f)]; }
};

/// All four norms for every field in one pass over a uniform n x n grid.
ErrorReport error_report(const JetFunction& predicted, const JetFunction& exact, const DomainSpec& domain,
                         int n_per_side);
ErrorReport error_report(const MLPArchitecture& arch, const ParameterVector& params, const DomainSpec& domain,
                         int n_per_side = 100);

/// Pointwise |exact - predicted| per field, row-major aligned with `grid`.
std::array<std::vector<double>, 4> error_field(const JetFunction& predicted, const JetFunction& exact,
                                               std::span<const Point2> grid);
std::array<std::vector<double>, 4> error_field(const MLPArchitecture& arch, const ParameterVector& params,
                                               std::span<const Point2> grid);

/// Generalization error estimate: domain MSE + boundary MSE of the residuals
/// on unseen dense points. Same formula as total_loss; the LossSpec selects
/// whether the augmentation terms are part of the domain residual.
double estimate_generalization_error(const MLPArchitecture& arch, const ParameterVector& params,
                                     std::span<const Point2> domain_grid,
                                     std::span<const BoundaryPoint> boundary_grid, const FlowParameters& flow,
                                     const ForcingProvider& forcing = beltrami_forcing_provider(),
                                     LossSpec spec = {.augmented = false});

/// The same estimate for any jet source, assembled point by point with the
/// physics kernels and total_loss.
double estimate_generalization_error(const JetFunction& predicted, std::span<const Point2> domain_grid,
                                     std::span<const BoundaryPoint> boundary_grid, const FlowParameters& flow,
                                     const ForcingProvider& forcing = beltrami_forcing_provider(),
                                     LossSpec spec = {.augmented = false});

enum class AbscissaKind { TrainingError, CollocationCount };

std::string_view abscissa_name(AbscissaKind k);

/// Least-squares line through (log10 abscissa, log10 error).
struct ConvergenceFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  AbscissaKind abscissa = AbscissaKind::TrainingError;
  std::size_t points = 0;

  /// slope for training-error abscissa, -slope for collocation counts, so
  /// that rate 2 means error ~ N^-2.
  double rate() const { return abscissa == AbscissaKind::TrainingError ? slope : -slope; }
};

/// Throws ArgumentError for fewer than two pairs, nonpositive values, or a
/// degenerate (constant) abscissa.
ConvergenceFit fit_convergence(std::span<const std::pair<double, double>> points, AbscissaKind abscissa);

}  // namespace bpinn
