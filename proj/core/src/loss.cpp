#include "bpinn/loss.hpp"

#include <Eigen/Core>
#include <cmath>

#include "bpinn/errors.hpp"

namespace bpinn {

LossProblem::LossProblem(const CollocationSet& points, const FlowParameters& flow, const ForcingProvider& forcing,
                         LossSpec spec)
    : LossProblem(points.domain_points, points.boundary_points, flow, forcing, spec) {}

LossProblem::LossProblem(std::vector<Point2> domain, std::vector<BoundaryPoint> boundary,
                         const FlowParameters& flow, const ForcingProvider& forcing, LossSpec spec)
    : domain_(std::move(domain)), boundary_(std::move(boundary)), flow_(flow), spec_(spec) {
  if (domain_.empty()) throw ConfigError("loss problem has no domain points");
  if (boundary_.empty()) throw ConfigError("loss problem has no boundary points");
  flow_.validate();
  if (spec_.pressure_boundary) {
    for (const auto& b : boundary_) {
      if (!std::isfinite(b.target.p)) throw ConfigError("pressure boundary term requested without pressure data");
    }
  }
  forcing_.reserve(domain_.size());
  for (const Point2& p : domain_) forcing_.push_back(forcing(p, flow_));
}

namespace {

using Matrix = Eigen::MatrixXd;
using Array = Eigen::ArrayXXd;
using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using RowMajorMutMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using VectorMap = Eigen::Map<const Eigen::VectorXd>;
using VectorMutMap = Eigen::Map<Eigen::VectorXd>;

// Jet-valued activations of a batch of points. Each matrix holds `comps`
// column blocks of width `points`: value, dx, dy, dxx, dxy, dyy (or only the
// value block when comps == 1).
struct Batch {
  int comps = 1;
  Eigen::Index points = 0;
  Matrix input;
  std::vector<Matrix> z;  // per layer, pre-activation
  std::vector<Matrix> a;  // per hidden layer, post-activation
  std::vector<Array> s, t1, t2;
  Matrix adj_a;
  Matrix adj_z;

  auto block(Matrix& m, int c) { return m.middleCols(c * points, points); }
  auto block(const Matrix& m, int c) const { return m.middleCols(c * points, points); }

  void setup(const MLPArchitecture& arch, std::span<const Point2> pts, int components) {
    comps = components;
    points = static_cast<Eigen::Index>(pts.size());
    input = Matrix::Zero(2, comps * points);
    for (Eigen::Index i = 0; i < points; ++i) {
      input(0, i) = pts[static_cast<std::size_t>(i)].x;
      input(1, i) = pts[static_cast<std::size_t>(i)].y;
    }
    if (comps == kJetComponents) {
      input.block(0, points, 1, points).setOnes();      // dx/dx
      input.block(1, 2 * points, 1, points).setOnes();  // dy/dy
    }
    const std::size_t layers = arch.num_layers();
    z.resize(layers);
    a.resize(layers - 1);
    s.resize(layers - 1);
    t1.resize(layers - 1);
    t2.resize(layers - 1);
    for (std::size_t l = 0; l < layers; ++l) {
      z[l].resize(arch.fan_out(l), comps * points);
      if (l + 1 < layers) {
        a[l].resize(arch.fan_out(l), comps * points);
        s[l].resize(arch.fan_out(l), points);
        t1[l].resize(arch.fan_out(l), points);
        t2[l].resize(arch.fan_out(l), points);
      }
    }
  }

  const Matrix& output() const { return z.back(); }

  void forward(const MLPArchitecture& arch, std::span<const double> params) {
    const std::size_t layers = arch.num_layers();
    const Matrix* prev = &input;
    for (std::size_t l = 0; l < layers; ++l) {
      const int n = arch.fan_in(l);
      const int m = arch.fan_out(l);
      const RowMajorMap w(params.data() + arch.weight_offset(l), m, n);
      const VectorMap b(params.data() + arch.bias_offset(l), m);
      z[l].noalias() = w * (*prev);
      block(z[l], 0).colwise() += b;
      if (l + 1 == layers) break;

      const auto z0 = block(z[l], 0).array();
      s[l] = z0.tanh();
      t1[l] = 1.0 - s[l].square();
      t2[l] = -2.0 * s[l] * t1[l];
      block(a[l], 0) = s[l].matrix();
      if (comps == kJetComponents) {
        const auto zx = block(z[l], 1).array();
        const auto zy = block(z[l], 2).array();
        block(a[l], 1) = (t1[l] * zx).matrix();
        block(a[l], 2) = (t1[l] * zy).matrix();
        block(a[l], 3) = (t2[l] * zx.square() + t1[l] * block(z[l], 3).array()).matrix();
        block(a[l], 4) = (t2[l] * zx * zy + t1[l] * block(z[l], 4).array()).matrix();
        block(a[l], 5) = (t2[l] * zy.square() + t1[l] * block(z[l], 5).array()).matrix();
      }
      prev = &a[l];
    }
  }

  // Pull adj_a of hidden layer l back through the tanh jet into adj_z.
  void activation_adjoint(std::size_t l) {
    adj_z.resize(adj_a.rows(), adj_a.cols());
    const Array& t1l = t1[l];
    if (comps == 1) {
      block(adj_z, 0) = (block(adj_a, 0).array() * t1l).matrix();
      return;
    }
    const Array& sl = s[l];
    const Array& t2l = t2[l];
    const Array t3 = -2.0 * (t1l.square() + sl * t2l);
    const auto zx = block(z[l], 1).array();
    const auto zy = block(z[l], 2).array();
    const auto zxx = block(z[l], 3).array();
    const auto zxy = block(z[l], 4).array();
    const auto zyy = block(z[l], 5).array();
    const auto b0 = block(adj_a, 0).array();
    const auto b1 = block(adj_a, 1).array();
    const auto b2 = block(adj_a, 2).array();
    const auto b3 = block(adj_a, 3).array();
    const auto b4 = block(adj_a, 4).array();
    const auto b5 = block(adj_a, 5).array();

    block(adj_z, 0) = (b0 * t1l + (b1 * zx + b2 * zy) * t2l + b3 * (t3 * zx.square() + t2l * zxx) +
                       b4 * (t3 * zx * zy + t2l * zxy) + b5 * (t3 * zy.square() + t2l * zyy))
                          .matrix();
    block(adj_z, 1) = (b1 * t1l + 2.0 * b3 * t2l * zx + b4 * t2l * zy).matrix();
    block(adj_z, 2) = (b2 * t1l + 2.0 * b5 * t2l * zy + b4 * t2l * zx).matrix();
    block(adj_z, 3) = (b3 * t1l).matrix();
    block(adj_z, 4) = (b4 * t1l).matrix();
    block(adj_z, 5) = (b5 * t1l).matrix();
  }

  // Reverse sweep starting from d(loss)/d(output) held in adj_z; accumulates into grad.
  void backward(const MLPArchitecture& arch, std::span<const double> params, std::span<double> grad) {
    const std::size_t layers = arch.num_layers();
    for (std::size_t l = layers; l-- > 0;) {
      const int n = arch.fan_in(l);
      const int m = arch.fan_out(l);
      const Matrix& prev = l == 0 ? input : a[l - 1];
      RowMajorMutMap gw(grad.data() + arch.weight_offset(l), m, n);
      VectorMutMap gb(grad.data() + arch.bias_offset(l), m);
      gw.noalias() += adj_z * prev.transpose();
      gb += block(adj_z, 0).rowwise().sum();
      if (l == 0) break;
      const RowMajorMap w(params.data() + arch.weight_offset(l), m, n);
      adj_a.noalias() = w.transpose() * adj_z;
      activation_adjoint(l - 1);
    }
  }
};

constexpr int kU = 0, kV = 1, kP = 2, kT = 3;

}  // namespace

struct LossEngine::Impl {
  MLPArchitecture arch;
  const LossProblem* problem;
  Batch domain;
  Batch boundary;
  std::vector<DomainPointResiduals> domain_sq;
  std::vector<BoundaryPointResiduals> boundary_sq;
  std::vector<DomainResidualValues> domain_r;
  std::vector<AugmentationResidualValues> augm_r;

  Impl(MLPArchitecture a, const LossProblem& p) : arch(std::move(a)), problem(&p) {
    domain.setup(arch, p.domain_points(), kJetComponents);
    std::vector<Point2> bpts;
    bpts.reserve(p.boundary_points().size());
    for (const auto& b : p.boundary_points()) bpts.push_back(b.point);
    boundary.setup(arch, bpts, 1);
    domain_sq.resize(p.domain_points().size());
    boundary_sq.resize(bpts.size());
    domain_r.resize(p.domain_points().size());
    augm_r.resize(p.domain_points().size());
  }

  FieldJet2 domain_jet(Eigen::Index i) const {
    const Matrix& out = domain.output();
    const Eigen::Index np = domain.points;
    FieldJet2 j;
    for (Field f : kFields) {
      const auto row = static_cast<Eigen::Index>(f);
      j[f] = Jet2{out(row, i), out(row, np + i), out(row, 2 * np + i), out(row, 3 * np + i), out(row, 4 * np + i),
                  out(row, 5 * np + i)};
    }
    return j;
  }

  ResidualBreakdown run(std::span<const double> params, std::span<double> grad) {
    check_parameters(arch, params);
    const LossSpec& spec = problem->spec();
    const FlowParameters& flow = problem->flow();
    const auto forcing = problem->forcing();
    const auto targets = problem->boundary_points();

    domain.forward(arch, params);
    boundary.forward(arch, params);

    const Eigen::Index nd = domain.points;
    for (Eigen::Index i = 0; i < nd; ++i) {
      const FieldJet2 jet = domain_jet(i);
      const auto& fc = forcing[static_cast<std::size_t>(i)];
      const auto r = domain_residual_values(jet, flow, fc);
      auto& sq = domain_sq[static_cast<std::size_t>(i)];
      sq.domain = {r.momentum_x * r.momentum_x, r.momentum_y * r.momentum_y, r.divergence * r.divergence,
                   r.energy * r.energy};
      domain_r[static_cast<std::size_t>(i)] = r;
      if (spec.augmented) {
        const auto ra = augmentation_residual_values(jet, flow, fc);
        sq.augmentation = {ra.pressure_poisson * ra.pressure_poisson, ra.div_x * ra.div_x, ra.div_y * ra.div_y};
        augm_r[static_cast<std::size_t>(i)] = ra;
      }
    }
    const Matrix& bout = boundary.output();
    const Eigen::Index nb = boundary.points;
    for (Eigen::Index i = 0; i < nb; ++i) {
      const FieldState pred{bout(kU, i), bout(kV, i), bout(kP, i), bout(kT, i)};
      const auto& tgt = targets[static_cast<std::size_t>(i)];
      auto& sq = boundary_sq[static_cast<std::size_t>(i)];
      sq.values = boundary_residual_point(pred, tgt.dirichlet());
      if (spec.pressure_boundary) sq.pressure = (pred.p - tgt.target.p) * (pred.p - tgt.target.p);
    }
    const ResidualBreakdown breakdown = total_loss(domain_sq, boundary_sq, spec.augmented, spec.pressure_boundary);
    if (grad.empty()) return breakdown;

    std::fill(grad.begin(), grad.end(), 0.0);

    // d(loss)/d(domain output jets)
    {
      Matrix& g = domain.adj_z;
      g.setZero(4, kJetComponents * nd);
      const double k = 2.0 / static_cast<double>(nd);
      const double nu = flow.nu, alpha = flow.alpha, beta = flow.beta;
      const double gx = flow.g[0], gy = flow.g[1];
      for (Eigen::Index i = 0; i < nd; ++i) {
        const FieldJet2 j = domain_jet(i);
        const auto& r = domain_r[static_cast<std::size_t>(i)];
        const double ru = k * r.momentum_x, rv = k * r.momentum_y, rd = k * r.divergence, rt = k * r.energy;
        double rp = 0.0, rdx = 0.0, rdy = 0.0;
        if (spec.augmented) {
          const auto& ra = augm_r[static_cast<std::size_t>(i)];
          rp = k * ra.pressure_poisson;
          rdx = k * ra.div_x;
          rdy = k * ra.div_y;
        }
        auto at = [&](int field, int c) -> double& { return g(field, c * nd + i); };
        const Jet2& u = j.u;
        const Jet2& v = j.v;
        const Jet2& t = j.theta;

        at(kU, 0) = ru * u.dx + rv * v.dx + rt * t.dx + rp * (u.dxx + v.dxy);
        at(kU, 1) = ru * u.value + rd + rp * 2.0 * u.dx;
        at(kU, 2) = ru * v.value + rp * 2.0 * v.dx;
        at(kU, 3) = -nu * ru + rp * u.value + rdx;
        at(kU, 4) = rp * v.value + rdy;
        at(kU, 5) = -nu * ru;

        at(kV, 0) = ru * u.dy + rv * v.dy + rt * t.dy + rp * (u.dxy + v.dyy);
        at(kV, 1) = rv * u.value + rp * 2.0 * u.dy;
        at(kV, 2) = rv * v.value + rd + rp * 2.0 * v.dy;
        at(kV, 3) = -nu * rv;
        at(kV, 4) = rp * u.value + rdx;
        at(kV, 5) = -nu * rv + rp * v.value + rdy;

        at(kP, 1) = ru;
        at(kP, 2) = rv;
        at(kP, 3) = rp;
        at(kP, 5) = rp;

        at(kT, 0) = (ru * gx + rv * gy) * beta;
        at(kT, 1) = rt * u.value + rp * beta * gx;
        at(kT, 2) = rt * v.value + rp * beta * gy;
        at(kT, 3) = -alpha * rt;
        at(kT, 5) = -alpha * rt;
      }
      domain.backward(arch, params, grad);
    }

    // d(loss)/d(boundary outputs)
    {
      Matrix& g = boundary.adj_z;
      g.setZero(4, nb);
      const double k = 2.0 / static_cast<double>(nb);
      for (Eigen::Index i = 0; i < nb; ++i) {
        const auto& tgt = targets[static_cast<std::size_t>(i)].target;
        g(kU, i) = k * (bout(kU, i) - tgt.u);
        g(kV, i) = k * (bout(kV, i) - tgt.v);
        g(kT, i) = k * (bout(kT, i) - tgt.theta);
        if (spec.pressure_boundary) g(kP, i) = k * (bout(kP, i) - tgt.p);
      }
      boundary.backward(arch, params, grad);
    }
    return breakdown;
  }
};

LossEngine::LossEngine(MLPArchitecture arch, const LossProblem& problem)
    : impl_(std::make_unique<Impl>(std::move(arch), problem)) {}
LossEngine::~LossEngine() = default;
LossEngine::LossEngine(LossEngine&&) noexcept = default;
LossEngine& LossEngine::operator=(LossEngine&&) noexcept = default;

ResidualBreakdown LossEngine::evaluate(std::span<const double> params) { return impl_->run(params, {}); }

ResidualBreakdown LossEngine::evaluate(std::span<const double> params, std::span<double> gradient) {
  if (gradient.size() != params.size()) throw ArchitectureError("gradient buffer length does not match parameters");
  return impl_->run(params, gradient);
}

const MLPArchitecture& LossEngine::architecture() const { return impl_->arch; }

namespace {
void require_finite(const ResidualBreakdown& b) {
  if (!std::isfinite(b.r_total)) throw NumericalOverflowError("non-finite total residual");
}
}  // namespace

ResidualBreakdown evaluate_loss(const MLPArchitecture& arch, std::span<const double> params,
                                const LossProblem& problem) {
  LossEngine engine(arch, problem);
  auto b = engine.evaluate(params);
  require_finite(b);
  return b;
}

LossEvaluation loss_gradient(const MLPArchitecture& arch, std::span<const double> params,
                             const LossProblem& problem) {
  LossEngine engine(arch, problem);
  LossEvaluation out;
  out.gradient.assign(params.size(), 0.0);
  out.breakdown = engine.evaluate(params, out.gradient);
  require_finite(out.breakdown);
  return out;
}

LossEvaluation loss_gradient(const MLPArchitecture& arch, std::span<const double> params, LossSpec spec,
                             const CollocationSet& collocation, const FlowParameters& flow,
                             const ForcingProvider& forcing) {
  const LossProblem problem(collocation, flow, forcing, spec);
  return loss_gradient(arch, params, problem);
}

}  // namespace bpinn
