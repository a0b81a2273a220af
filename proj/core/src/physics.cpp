#include "bpinn/physics.hpp"

#include <cmath>
#include <numbers>

#include "bpinn/errors.hpp"

namespace bpinn {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double sq(double v) { return v * v; }
}  // namespace

void FlowParameters::validate() const {
  if (!(std::isfinite(nu) && std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(g[0]) &&
        std::isfinite(g[1]))) {
    throw ConfigError("flow parameters must be finite");
  }
  if (!(nu > 0.0)) throw ConfigError("flow.nu must be positive");
  if (!(alpha > 0.0)) throw ConfigError("flow.alpha must be positive");
}

void DomainSpec::validate() const {
  if (!(std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) && std::isfinite(y_max))) {
    throw ConfigError("domain bounds must be finite");
  }
  if (!(x_min < x_max) || !(y_min < y_max)) throw ConfigError("domain requires x_min < x_max and y_min < y_max");
}

DomainResidualValues domain_residual_values(const FieldJet2& jet, const FlowParameters& flow,
                                            const Forcing& forcing) {
  const Jet2& u = jet.u;
  const Jet2& v = jet.v;
  const Jet2& p = jet.p;
  const Jet2& t = jet.theta;
  DomainResidualValues r;
  r.momentum_x = u.value * u.dx + v.value * u.dy + p.dx - flow.nu * u.laplacian() +
                 flow.g[0] * flow.beta * t.value - forcing.fb[0];
  r.momentum_y = u.value * v.dx + v.value * v.dy + p.dy - flow.nu * v.laplacian() +
                 flow.g[1] * flow.beta * t.value - forcing.fb[1];
  r.divergence = u.dx + v.dy;
  r.energy = u.value * t.dx + v.value * t.dy - flow.alpha * t.laplacian() - forcing.f;
  return r;
}

AugmentationResidualValues augmentation_residual_values(const FieldJet2& jet, const FlowParameters& flow,
                                                        const Forcing& forcing) {
  const Jet2& u = jet.u;
  const Jet2& v = jet.v;
  const Jet2& t = jet.theta;
  // div(u . grad u), expanded by the product rule.
  const double div_convection = u.dx * u.dx + u.value * u.dxx + v.dx * u.dy + v.value * u.dxy + u.dy * v.dx +
                                u.value * v.dxy + v.dy * v.dy + v.value * v.dyy;
  const double div_buoyancy = flow.beta * (flow.g[0] * t.dx + flow.g[1] * t.dy);
  AugmentationResidualValues r;
  r.pressure_poisson = jet.p.laplacian() - (forcing.div_fb - div_convection - div_buoyancy);
  r.div_x = u.dxx + v.dxy;
  r.div_y = u.dxy + v.dyy;
  return r;
}

std::array<double, 4> domain_residual_point(const FieldJet2& jet, const FlowParameters& flow,
                                            std::array<double, 2> fb, double f) {
  const auto r = domain_residual_values(jet, flow, Forcing{fb, f, 0.0});
  return {sq(r.momentum_x), sq(r.momentum_y), sq(r.divergence), sq(r.energy)};
}

std::array<double, 3> augmentation_residual_point(const FieldJet2& jet, const FlowParameters& flow,
                                                  const Forcing& forcing) {
  const auto r = augmentation_residual_values(jet, flow, forcing);
  return {sq(r.pressure_poisson), sq(r.div_x), sq(r.div_y)};
}

std::array<double, 3> boundary_residual_point(const FieldState& pred, const DirichletTarget& target) {
  return {sq(pred.u - target.u), sq(pred.v - target.v), sq(pred.theta - target.theta)};
}

ResidualBreakdown total_loss(std::span<const DomainPointResiduals> domain,
                             std::span<const BoundaryPointResiduals> boundary, bool augmented,
                             bool pressure_boundary) {
  if (domain.empty()) throw ConfigError("total_loss: empty domain point set");
  if (boundary.empty()) throw ConfigError("total_loss: empty boundary point set");

  std::array<double, 4> dsum{};
  std::array<double, 3> asum{};
  for (const auto& r : domain) {
    for (int k = 0; k < 4; ++k) dsum[k] += r.domain[k];
    if (augmented) {
      for (int k = 0; k < 3; ++k) asum[k] += r.augmentation[k];
    }
  }
  std::array<double, 3> bsum{};
  double psum = 0.0;
  for (const auto& r : boundary) {
    for (int k = 0; k < 3; ++k) bsum[k] += r.values[k];
    if (pressure_boundary) psum += r.pressure;
  }

  const auto nd = static_cast<double>(domain.size());
  const auto nb = static_cast<double>(boundary.size());
  ResidualBreakdown b;
  b.augmented = augmented;
  b.pressure_boundary = pressure_boundary;
  b.r_u = dsum[0] / nd;
  b.r_v = dsum[1] / nd;
  b.r_div = dsum[2] / nd;
  b.r_theta = dsum[3] / nd;
  b.r_u_b = bsum[0] / nb;
  b.r_v_b = bsum[1] / nb;
  b.r_theta_b = bsum[2] / nb;
  b.r_p_b = pressure_boundary ? psum / nb : 0.0;
  b.r_domain = b.r_u + b.r_v + b.r_div + b.r_theta;
  b.r_boundary = b.r_u_b + b.r_v_b + b.r_theta_b + b.r_p_b;
  b.r_total = b.r_domain + b.r_boundary;
  if (augmented) {
    b.r_p = asum[0] / nd;
    b.r_div_x = asum[1] / nd;
    b.r_div_y = asum[2] / nd;
    b.r_augm = b.r_p + b.r_div_x + b.r_div_y;
    b.r_total += b.r_augm;
  }
  return b;
}

FieldState beltrami_exact(Point2 pt) {
  const double cx = std::cos(kPi * pt.x), sx = std::sin(kPi * pt.x);
  const double cy = std::cos(kPi * pt.y), sy = std::sin(kPi * pt.y);
  return {-cx * sy, sx * cy, -0.25 * (std::cos(2.0 * kPi * pt.x) + std::cos(2.0 * kPi * pt.y)), cx * cy};
}

FieldJet2 beltrami_exact_jet(Point2 pt) {
  const double cx = std::cos(kPi * pt.x), sx = std::sin(kPi * pt.x);
  const double cy = std::cos(kPi * pt.y), sy = std::sin(kPi * pt.y);
  const double c2x = std::cos(2.0 * kPi * pt.x), s2x = std::sin(2.0 * kPi * pt.x);
  const double c2y = std::cos(2.0 * kPi * pt.y), s2y = std::sin(2.0 * kPi * pt.y);
  const double pi2 = kPi * kPi;

  FieldJet2 j;
  j.u = {-cx * sy, kPi * sx * sy, -kPi * cx * cy, pi2 * cx * sy, pi2 * sx * cy, pi2 * cx * sy};
  j.v = {sx * cy, kPi * cx * cy, -kPi * sx * sy, -pi2 * sx * cy, -pi2 * cx * sy, -pi2 * sx * cy};
  j.p = {-0.25 * (c2x + c2y), 0.5 * kPi * s2x, 0.5 * kPi * s2y, pi2 * c2x, 0.0, pi2 * c2y};
  j.theta = {cx * cy, -kPi * sx * cy, -kPi * cx * sy, -pi2 * cx * cy, pi2 * sx * sy, -pi2 * cx * cy};
  return j;
}

BodyForceAndSource beltrami_forcing(Point2 pt, const FlowParameters& flow) {
  const double cx = std::cos(kPi * pt.x), sx = std::sin(kPi * pt.x);
  const double cy = std::cos(kPi * pt.y), sy = std::sin(kPi * pt.y);
  const double two_pi2 = 2.0 * kPi * kPi;
  BodyForceAndSource out;
  out.fb[0] = -two_pi2 * flow.nu * cx * sy + flow.g[0] * flow.beta * cx * cy;
  out.fb[1] = two_pi2 * flow.nu * sx * cy + flow.g[1] * flow.beta * cx * cy;
  out.f = two_pi2 * flow.alpha * cx * cy;
  return out;
}

double beltrami_forcing_divergence(Point2 pt, const FlowParameters& flow) {
  const double cx = std::cos(kPi * pt.x), sx = std::sin(kPi * pt.x);
  const double cy = std::cos(kPi * pt.y), sy = std::sin(kPi * pt.y);
  const double two_pi3 = 2.0 * kPi * kPi * kPi;
  const double dfbx_dx = two_pi3 * flow.nu * sx * sy - flow.g[0] * flow.beta * kPi * sx * cy;
  const double dfby_dy = -two_pi3 * flow.nu * sx * sy - flow.g[1] * flow.beta * kPi * cx * sy;
  return dfbx_dx + dfby_dy;
}

Forcing beltrami_forcing_bundle(Point2 p, const FlowParameters& flow) {
  const auto fs = beltrami_forcing(p, flow);
  return {fs.fb, fs.f, beltrami_forcing_divergence(p, flow)};
}

}  // namespace bpinn
