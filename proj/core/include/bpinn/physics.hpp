#pragma once

#include <array>
#include <functional>
#include <span>

#include "bpinn/types.hpp"

namespace bpinn {

/// Material parameters of the Boussinesq system, all nondimensional.
/// The Reynolds number enters as nu = 1 / Re.
struct FlowParameters {
  double nu = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  std::array<double, 2> g = {0.0, -1.0};

  /// Throws ConfigError unless nu > 0, alpha > 0 and everything is finite.
  void validate() const;

  friend bool operator==(const FlowParameters&, const FlowParameters&) = default;
};

/// Axis-aligned rectangle [x_min, x_max] x [y_min, y_max].
struct DomainSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = -1.0;
  double y_max = 1.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool contains(Point2 p) const { return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max; }
  void validate() const;

  friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

/// Body force, heat source and divergence of the body force at one point.
struct Forcing {
  std::array<double, 2> fb = {0.0, 0.0};
  double f = 0.0;
  double div_fb = 0.0;
};

using ForcingProvider = std::function<Forcing(Point2, const FlowParameters&)>;
using SolutionProvider = std::function<FieldState(Point2)>;

/// Signed pointwise residuals of momentum (x, y), continuity and energy.
struct DomainResidualValues {
  double momentum_x = 0.0;
  double momentum_y = 0.0;
  double divergence = 0.0;
  double energy = 0.0;
};

/// Signed pointwise residuals of the pressure-Poisson equation and the two
/// derivatives of the continuity constraint.
struct AugmentationResidualValues {
  double pressure_poisson = 0.0;
  double div_x = 0.0;
  double div_y = 0.0;
};

DomainResidualValues domain_residual_values(const FieldJet2& jet, const FlowParameters& flow,
                                            const Forcing& forcing);
AugmentationResidualValues augmentation_residual_values(const FieldJet2& jet, const FlowParameters& flow,
                                                        const Forcing& forcing);

/// Squared residuals (momentum-x, momentum-y, divergence, energy).
std::array<double, 4> domain_residual_point(const FieldJet2& jet, const FlowParameters& flow,
                                            std::array<double, 2> fb, double f);

/// Squared residuals (pressure-Poisson, div-x, div-y). `forcing.f` is unused.
std::array<double, 3> augmentation_residual_point(const FieldJet2& jet, const FlowParameters& flow,
                                                  const Forcing& forcing);

/// Dirichlet data for velocity and temperature.
struct DirichletTarget {
  double u = 0.0;
  double v = 0.0;
  double theta = 0.0;
};

/// Squared differences for u, v and theta.
std::array<double, 3> boundary_residual_point(const FieldState& pred, const DirichletTarget& target);

/// Mean squared residuals per component plus their unweighted sums.
///
/// r_p_b is only populated when a pressure boundary term is requested; it is
/// then part of r_boundary. The augmentation components and r_augm are zero
/// and excluded from r_total when `augmented` is false.
struct ResidualBreakdown {
  double r_u = 0.0;
  double r_v = 0.0;
  double r_div = 0.0;
  double r_theta = 0.0;
  double r_u_b = 0.0;
  double r_v_b = 0.0;
  double r_theta_b = 0.0;
  double r_p_b = 0.0;
  double r_p = 0.0;
  double r_div_x = 0.0;
  double r_div_y = 0.0;
  double r_domain = 0.0;
  double r_boundary = 0.0;
  double r_augm = 0.0;
  double r_total = 0.0;
  bool augmented = false;
  bool pressure_boundary = false;
};

/// Pointwise squared domain residuals as produced by domain_residual_point
/// and augmentation_residual_point.
struct DomainPointResiduals {
  std::array<double, 4> domain{};
  std::array<double, 3> augmentation{};
};

/// Pointwise squared boundary residuals; `pressure` is only read when the
/// pressure boundary term is enabled.
struct BoundaryPointResiduals {
  std::array<double, 3> values{};
  double pressure = 0.0;
};

/// Aggregates pointwise squared residuals into means and totals. Sums run
/// sequentially in point order. Throws ConfigError on an empty point set.
ResidualBreakdown total_loss(std::span<const DomainPointResiduals> domain,
                             std::span<const BoundaryPointResiduals> boundary, bool augmented,
                             bool pressure_boundary = false);

// Beltrami manufactured solution on the whole plane (period 2 in x and y).

FieldState beltrami_exact(Point2 p);
FieldJet2 beltrami_exact_jet(Point2 p);

struct BodyForceAndSource {
  std::array<double, 2> fb{};
  double f = 0.0;
};

BodyForceAndSource beltrami_forcing(Point2 p, const FlowParameters& flow);
double beltrami_forcing_divergence(Point2 p, const FlowParameters& flow);

/// beltrami_forcing and its divergence bundled as a ForcingProvider.
Forcing beltrami_forcing_bundle(Point2 p, const FlowParameters& flow);

inline ForcingProvider beltrami_forcing_provider() { return &beltrami_forcing_bundle; }
inline SolutionProvider beltrami_solution_provider() { return &beltrami_exact; }

}  // namespace bpinn
