#include "bpinn/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "bpinn/errors.hpp"
#include "bpinn/jet.hpp"

namespace bpinn {

JetFunction network_jets(const MLPArchitecture& arch, const ParameterVector& params) {
  check_parameters(arch, params.values());
  return [arch, params](Point2 p) { return evaluate_jet(arch, params, p); };
}

JetFunction beltrami_jets() { return &beltrami_exact_jet; }

namespace {

// Max |D^alpha e| for |alpha| = 0, 1, 2 of one field's error jet.
std::array<double, 3> order_maxima(const Jet2& exact, const Jet2& pred) {
  const double e0 = std::abs(exact.value - pred.value);
  const double e1 = std::max(std::abs(exact.dx - pred.dx), std::abs(exact.dy - pred.dy));
  const double e2 = std::max({std::abs(exact.dxx - pred.dxx), std::abs(exact.dxy - pred.dxy),
                              std::abs(exact.dyy - pred.dyy)});
  return {e0, e1, e2};
}

}  // namespace

PerField sobolev_error(const JetFunction& predicted, const JetFunction& exact, std::span<const Point2> grid,
                       int k) {
  if (k < 0 || k > 2) throw ArgumentError("sobolev_error: order must be 0, 1 or 2");
  PerField out{};
  for (const Point2& pt : grid) {
    const FieldJet2 e = exact(pt);
    const FieldJet2 p = predicted(pt);
    for (Field f : kFields) {
      const auto m = order_maxima(e[f], p[f]);
      double& acc = out[static_cast<std::size_t>(f)];
      for (int order = 0; order <= k; ++order) acc = std::max(acc, m[static_cast<std::size_t>(order)]);
    }
  }
  return out;
}

PerField sobolev_error(const MLPArchitecture& arch, const ParameterVector& params, std::span<const Point2> grid,
                       int k) {
  return sobolev_error(network_jets(arch, params), beltrami_jets(), grid, k);
}

PerField l2_error(const JetFunction& predicted, const JetFunction& exact, std::span<const Point2> grid) {
  PerField sum{};
  for (const Point2& pt : grid) {
    const FieldState e = exact(pt).values();
    const FieldState p = predicted(pt).values();
    for (Field f : kFields) {
      const double d = value_of(e, f) - value_of(p, f);
      sum[static_cast<std::size_t>(f)] += d * d;
    }
  }
  const auto n = static_cast<double>(grid.size());
  for (double& s : sum) s = grid.empty() ? 0.0 : std::sqrt(s / n);
  return sum;
}

PerField l2_error(const MLPArchitecture& arch, const ParameterVector& params, std::span<const Point2> grid) {
  // Values only; no need for jets.
  check_parameters(arch, params.values());
  PerField sum{};
  for (const Point2& pt : grid) {
    const FieldState e = beltrami_exact(pt);
    const FieldState p = forward(arch, params, pt);
    for (Field f : kFields) {
      const double d = value_of(e, f) - value_of(p, f);
      sum[static_cast<std::size_t>(f)] += d * d;
    }
  }
  const auto n = static_cast<double>(grid.size());
  for (double& s : sum) s = grid.empty() ? 0.0 : std::sqrt(s / n);
  return sum;
}

ErrorReport error_report(const JetFunction& predicted, const JetFunction& exact, const DomainSpec& domain,
                         int n_per_side) {
  const auto grid = test_grid(domain, n_per_side);
  ErrorReport rep;
  rep.grid_points = grid.size();
  rep.n_per_side = n_per_side;
  rep.domain = domain;
  PerField sq{};
  for (const Point2& pt : grid) {
    const FieldJet2 e = exact(pt);
    const FieldJet2 p = predicted(pt);
    for (Field f : kFields) {
      const auto i = static_cast<std::size_t>(f);
      const auto m = order_maxima(e[f], p[f]);
      auto& fe = rep.fields[i];
      fe.w0_inf = std::max(fe.w0_inf, m[0]);
      fe.w1_inf = std::max({fe.w1_inf, m[0], m[1]});
      fe.w2_inf = std::max({fe.w2_inf, m[0], m[1], m[2]});
      sq[i] += m[0] * m[0];
    }
  }
  for (std::size_t i = 0; i < 4; ++i) rep.fields[i].l2 = std::sqrt(sq[i] / static_cast<double>(grid.size()));
  return rep;
}

ErrorReport error_report(const MLPArchitecture& arch, const ParameterVector& params, const DomainSpec& domain,
                         int n_per_side) {
  return error_report(network_jets(arch, params), beltrami_jets(), domain, n_per_side);
}

std::array<std::vector<double>, 4> error_field(const JetFunction& predicted, const JetFunction& exact,
                                               std::span<const Point2> grid) {
  std::array<std::vector<double>, 4> out;
  for (auto& v : out) v.reserve(grid.size());
  for (const Point2& pt : grid) {
    const FieldState e = exact(pt).values();
    const FieldState p = predicted(pt).values();
    for (Field f : kFields) out[static_cast<std::size_t>(f)].push_back(std::abs(value_of(e, f) - value_of(p, f)));
  }
  return out;
}

std::array<std::vector<double>, 4> error_field(const MLPArchitecture& arch, const ParameterVector& params,
                                               std::span<const Point2> grid) {
  return error_field(network_jets(arch, params), beltrami_jets(), grid);
}

double estimate_generalization_error(const MLPArchitecture& arch, const ParameterVector& params,
                                     std::span<const Point2> domain_grid,
                                     std::span<const BoundaryPoint> boundary_grid, const FlowParameters& flow,
                                     const ForcingProvider& forcing, LossSpec spec) {
  const LossProblem problem(std::vector<Point2>(domain_grid.begin(), domain_grid.end()),
                            std::vector<BoundaryPoint>(boundary_grid.begin(), boundary_grid.end()), flow, forcing,
                            spec);
  return evaluate_loss(arch, params.values(), problem).r_total;
}

double estimate_generalization_error(const JetFunction& predicted, std::span<const Point2> domain_grid,
                                     std::span<const BoundaryPoint> boundary_grid, const FlowParameters& flow,
                                     const ForcingProvider& forcing, LossSpec spec) {
  std::vector<DomainPointResiduals> dom;
  dom.reserve(domain_grid.size());
  for (const Point2& q : domain_grid) {
    const FieldJet2 jet = predicted(q);
    const Forcing fo = forcing(q, flow);
    dom.push_back({domain_residual_point(jet, flow, fo.fb, fo.f), augmentation_residual_point(jet, flow, fo)});
  }
  std::vector<BoundaryPointResiduals> bnd;
  bnd.reserve(boundary_grid.size());
  for (const BoundaryPoint& b : boundary_grid) {
    const FieldState s = predicted(b.point).values();
    const double dp = s.p - b.target.p;
    bnd.push_back({boundary_residual_point(s, b.dirichlet()), dp * dp});
  }
  return total_loss(dom, bnd, spec.augmented, spec.pressure_boundary).r_total;
}

std::string_view abscissa_name(AbscissaKind k) {
  return k == AbscissaKind::TrainingError ? "training_error" : "collocation_count";
}

ConvergenceFit fit_convergence(std::span<const std::pair<double, double>> points, AbscissaKind abscissa) {
  if (points.size() < 2) throw ArgumentError("fit_convergence: need at least two points");
  std::vector<double> lx, ly;
  for (const auto& [a, e] : points) {
    if (!(a > 0.0) || !(e > 0.0) || !std::isfinite(a) || !std::isfinite(e)) {
      throw ArgumentError("fit_convergence: abscissa and error must be positive and finite");
    }
    lx.push_back(std::log10(a));
    ly.push_back(std::log10(e));
  }
  const auto n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw ArgumentError("fit_convergence: abscissa values are all equal");

  ConvergenceFit fit;
  fit.abscissa = abscissa;
  fit.points = lx.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

}  // namespace bpinn
