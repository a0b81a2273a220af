#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace bpinn {

struct AdamHyperparameters {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long long step = 0;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update in place. `t` is the 1-based step index.
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state, long long t,
               const AdamHyperparameters& hp);

/// Objective for the quasi-Newton solver: returns f(x) and writes grad f(x).
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
  int history = 20;
  int max_iterations = 1000;
  double gradient_tolerance = 1e-10;  // stop when ||g||_inf <= tol
  double c1 = 1e-4;                   // sufficient decrease
  double c2 = 0.9;                    // curvature (strong Wolfe)
  int max_line_search_evaluations = 25;
};

enum class LbfgsStatus {
  GradientConverged,
  StoppedByCallback,
  MaxIterations,
  LineSearchFailed,
  NonFiniteObjective,
};

std::string_view lbfgs_status_name(LbfgsStatus s);

/// State presented to the iteration callback before step `iteration` is taken.
/// The objective was last evaluated at `x`, so caller-side caches of that
/// evaluation are current.
struct LbfgsIterate {
  int iteration = 0;  // number of steps taken so far
  double f = 0.0;
  std::span<const double> x;
  std::span<const double> grad;
};

/// Return false to stop.
using LbfgsCallback = std::function<bool(const LbfgsIterate&)>;

struct LbfgsResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
  LbfgsStatus status = LbfgsStatus::MaxIterations;
};

/// Limited-memory BFGS: two-loop recursion for the search direction and a
/// strong-Wolfe line search (bracketing + cubic-interpolation zoom). On a
/// line-search failure the memory is dropped and a steepest-descent step is
/// tried once before giving up with LineSearchFailed; the best point found is
/// returned in that case.
LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0, const LbfgsOptions& options,
                           const LbfgsCallback& callback = {});

}  // namespace bpinn
