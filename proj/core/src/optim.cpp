#include "bpinn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "bpinn/errors.hpp"

namespace bpinn {

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state, long long t,
               const AdamHyperparameters& hp) {
  if (grad.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ArgumentError("adam_step: parameter, gradient and moment sizes differ");
  }
  if (t < 1) throw ArgumentError("adam_step: step index starts at 1");
  const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    state.m[i] = hp.beta1 * state.m[i] + (1.0 - hp.beta1) * g;
    state.v[i] = hp.beta2 * state.v[i] + (1.0 - hp.beta2) * g * g;
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= hp.learning_rate * m_hat / (std::sqrt(v_hat) + hp.epsilon);
  }
  state.step = t;
}

std::string_view lbfgs_status_name(LbfgsStatus s) {
  switch (s) {
    case LbfgsStatus::GradientConverged: return "gradient_converged";
    case LbfgsStatus::StoppedByCallback: return "stopped_by_callback";
    case LbfgsStatus::MaxIterations: return "max_iterations";
    case LbfgsStatus::LineSearchFailed: return "line_search_failed";
    case LbfgsStatus::NonFiniteObjective: return "non_finite_objective";
  }
  return "unknown";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct CurvaturePair {
  std::vector<double> s;
  std::vector<double> y;
  double rho = 0.0;
};

// Minimizer of the cubic interpolating (a, fa, da) and (b, fb, db), or NaN.
double cubic_minimizer(double a, double fa, double da, double b, double fb, double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (!(disc >= 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  const double denom = db - da + 2.0 * d2;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return b - (b - a) * (db + d2 - d1) / denom;
}

class LineSearch {
 public:
  LineSearch(const Objective& obj, const LbfgsOptions& opt, std::span<const double> x0, double f0,
             std::span<const double> d, double dphi0)
      : obj_(obj), opt_(opt), x0_(x0), f0_(f0), d_(d), dphi0_(dphi0), xt_(x0.size()), gt_(x0.size()) {}

  // Strong-Wolfe step. On success the last evaluation is the returned point,
  // held in trial_x()/trial_g().
  bool run(double alpha0) {
    double a_prev = 0.0, f_prev = f0_, d_prev = dphi0_;
    double a = alpha0;
    for (int i = 1;; ++i) {
      if (evaluations_ >= opt_.max_line_search_evaluations) return false;
      double fa = 0.0, da = 0.0;
      eval(a, fa, da);
      if (!std::isfinite(fa) || fa > f0_ + opt_.c1 * a * dphi0_ || (i > 1 && fa >= f_prev)) {
        return zoom(a_prev, f_prev, d_prev, a, fa, da);
      }
      if (std::abs(da) <= -opt_.c2 * dphi0_) return true;
      if (da >= 0.0) return zoom(a, fa, da, a_prev, f_prev, d_prev);
      a_prev = a;
      f_prev = fa;
      d_prev = da;
      a *= 2.0;
    }
  }

  std::span<const double> trial_x() const { return xt_; }
  std::span<const double> trial_g() const { return gt_; }
  double trial_f() const { return ft_; }
  double best_alpha() const { return best_alpha_; }
  double best_f() const { return best_f_; }
  int evaluations() const { return evaluations_; }

 private:
  void eval(double a, double& fa, double& da) {
    for (std::size_t i = 0; i < xt_.size(); ++i) xt_[i] = x0_[i] + a * d_[i];
    fa = obj_(xt_, gt_);
    ++evaluations_;
    da = std::isfinite(fa) ? dot(gt_, d_) : std::numeric_limits<double>::quiet_NaN();
    ft_ = fa;
    if (std::isfinite(fa) && fa < best_f_) {
      best_f_ = fa;
      best_alpha_ = a;
    }
  }

  bool zoom(double lo, double f_lo, double d_lo, double hi, double f_hi, double d_hi) {
    while (evaluations_ < opt_.max_line_search_evaluations) {
      const double width = hi - lo;
      if (std::abs(width) <= 1e-16 * std::max(1.0, std::abs(lo))) return false;
      double a = std::isfinite(f_hi) ? cubic_minimizer(lo, f_lo, d_lo, hi, f_hi, d_hi)
                                     : std::numeric_limits<double>::quiet_NaN();
      const double a_min = std::min(lo, hi) + 0.1 * std::abs(width);
      const double a_max = std::max(lo, hi) - 0.1 * std::abs(width);
      if (!std::isfinite(a) || a < a_min || a > a_max) a = lo + 0.5 * width;
      double fa = 0.0, da = 0.0;
      eval(a, fa, da);
      if (!std::isfinite(fa) || fa > f0_ + opt_.c1 * a * dphi0_ || fa >= f_lo) {
        hi = a;
        f_hi = fa;
        d_hi = da;
      } else {
        if (std::abs(da) <= -opt_.c2 * dphi0_) return true;
        if (da * (hi - lo) >= 0.0) {
          hi = lo;
          f_hi = f_lo;
          d_hi = d_lo;
        }
        lo = a;
        f_lo = fa;
        d_lo = da;
      }
    }
    return false;
  }

  const Objective& obj_;
  const LbfgsOptions& opt_;
  std::span<const double> x0_;
  double f0_;
  std::span<const double> d_;
  double dphi0_;
  std::vector<double> xt_, gt_;
  double ft_ = 0.0;
  double best_f_ = std::numeric_limits<double>::infinity();
  double best_alpha_ = 0.0;
  int evaluations_ = 0;
};

}  // namespace

LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0, const LbfgsOptions& options,
                           const LbfgsCallback& callback) {
  if (options.history < 1) throw ArgumentError("lbfgs: history must be at least 1");
  const std::size_t n = x0.size();
  LbfgsResult res;
  res.x = std::move(x0);
  std::vector<double> g(n);
  res.f = objective(res.x, g);
  res.evaluations = 1;
  if (!std::isfinite(res.f)) {
    res.status = LbfgsStatus::NonFiniteObjective;
    return res;
  }

  std::deque<CurvaturePair> memory;
  std::vector<double> d(n), alpha_buf;
  for (;;) {
    if (callback && !callback({res.iterations, res.f, res.x, g})) {
      res.status = LbfgsStatus::StoppedByCallback;
      return res;
    }
    if (norm_inf(g) <= options.gradient_tolerance) {
      res.status = LbfgsStatus::GradientConverged;
      return res;
    }
    if (res.iterations >= options.max_iterations) {
      res.status = LbfgsStatus::MaxIterations;
      return res;
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1) {
        if (memory.empty()) break;
        memory.clear();
      }
      // Two-loop recursion: d = -H g.
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      alpha_buf.assign(memory.size(), 0.0);
      for (std::size_t k = memory.size(); k-- > 0;) {
        alpha_buf[k] = memory[k].rho * dot(memory[k].s, d);
        for (std::size_t i = 0; i < n; ++i) d[i] -= alpha_buf[k] * memory[k].y[i];
      }
      if (!memory.empty()) {
        const auto& last = memory.back();
        const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
        for (double& di : d) di *= gamma;
      }
      for (std::size_t k = 0; k < memory.size(); ++k) {
        const double beta = memory[k].rho * dot(memory[k].y, d);
        for (std::size_t i = 0; i < n; ++i) d[i] += (alpha_buf[k] - beta) * memory[k].s[i];
      }
      double dphi0 = dot(g, d);
      if (!(dphi0 < 0.0)) {
        memory.clear();
        for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
        dphi0 = dot(g, d);
      }
      const double alpha0 = memory.empty() ? std::min(1.0, 1.0 / std::sqrt(dot(g, g))) : 1.0;

      LineSearch ls(objective, options, res.x, res.f, d, dphi0);
      const bool ok = ls.run(alpha0);
      res.evaluations += ls.evaluations();
      if (ok) {
        CurvaturePair pair;
        pair.s.resize(n);
        pair.y.resize(n);
        const auto xt = ls.trial_x();
        const auto gt = ls.trial_g();
        for (std::size_t i = 0; i < n; ++i) {
          pair.s[i] = xt[i] - res.x[i];
          pair.y[i] = gt[i] - g[i];
        }
        const double sy = dot(pair.s, pair.y);
        std::copy(xt.begin(), xt.end(), res.x.begin());
        std::copy(gt.begin(), gt.end(), g.begin());
        res.f = ls.trial_f();
        if (sy > 1e-12 * std::sqrt(dot(pair.y, pair.y) * dot(pair.s, pair.s))) {
          pair.rho = 1.0 / sy;
          memory.push_back(std::move(pair));
          if (static_cast<int>(memory.size()) > options.history) memory.pop_front();
        }
        accepted = true;
      } else if (attempt == 1 || memory.empty()) {
        // Give up: move to the best point seen if it improves, and leave the
        // objective evaluated there.
        if (ls.best_f() < res.f) {
          for (std::size_t i = 0; i < n; ++i) res.x[i] += ls.best_alpha() * d[i];
        }
        res.f = objective(res.x, g);
        ++res.evaluations;
        res.status = LbfgsStatus::LineSearchFailed;
        return res;
      }
    }
    ++res.iterations;
  }
}

}  // namespace bpinn
