#pragma once

#include <memory>
#include <span>
#include <vector>

#include "bpinn/net.hpp"
#include "bpinn/physics.hpp"
#include "bpinn/sampling.hpp"

namespace bpinn {

/// Which total residual is minimized.
struct LossSpec {
  bool augmented = true;          // add the pressure-Poisson terms (R_total with R_augm)
  bool pressure_boundary = false; // add a pressure Dirichlet term to the boundary residual
};

/// Collocation points with per-point forcing and boundary data resolved once.
class LossProblem {
 public:
  /// Throws ConfigError on an empty domain or boundary set, or when the
  /// pressure boundary term is requested but pressure targets are unknown.
  LossProblem(const CollocationSet& points, const FlowParameters& flow,
              const ForcingProvider& forcing = beltrami_forcing_provider(), LossSpec spec = {});

  LossProblem(std::vector<Point2> domain, std::vector<BoundaryPoint> boundary, const FlowParameters& flow,
              const ForcingProvider& forcing = beltrami_forcing_provider(), LossSpec spec = {});

  std::span<const Point2> domain_points() const { return domain_; }
  std::span<const Forcing> forcing() const { return forcing_; }
  std::span<const BoundaryPoint> boundary_points() const { return boundary_; }
  const FlowParameters& flow() const { return flow_; }
  const LossSpec& spec() const { return spec_; }

 private:
  std::vector<Point2> domain_;
  std::vector<Forcing> forcing_;
  std::vector<BoundaryPoint> boundary_;
  FlowParameters flow_;
  LossSpec spec_;
};

struct LossEvaluation {
  ResidualBreakdown breakdown;
  std::vector<double> gradient;
};

/// Batched evaluation of the total residual and its exact parameter gradient.
///
/// Spatial jets are propagated forward through the network for all points at
/// once; the gradient is accumulated by reverse sweeps over the jet-valued
/// forward pass. Workspaces are kept between calls, so one engine should be
/// reused across optimizer iterations. Reductions run in a fixed order and
/// results are bit-reproducible.
class LossEngine {
 public:
  LossEngine(MLPArchitecture arch, const LossProblem& problem);
  ~LossEngine();
  LossEngine(LossEngine&&) noexcept;
  LossEngine& operator=(LossEngine&&) noexcept;

  /// Residual breakdown only.
  ResidualBreakdown evaluate(std::span<const double> params);

  /// Breakdown plus gradient of r_total written to `gradient` (same length as params).
  ResidualBreakdown evaluate(std::span<const double> params, std::span<double> gradient);

  const MLPArchitecture& architecture() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ResidualBreakdown evaluate_loss(const MLPArchitecture& arch, std::span<const double> params,
                                const LossProblem& problem);

LossEvaluation loss_gradient(const MLPArchitecture& arch, std::span<const double> params,
                             const LossProblem& problem);

LossEvaluation loss_gradient(const MLPArchitecture& arch, std::span<const double> params, LossSpec spec,
                             const CollocationSet& collocation, const FlowParameters& flow,
                             const ForcingProvider& forcing = beltrami_forcing_provider());

}  // namespace bpinn
