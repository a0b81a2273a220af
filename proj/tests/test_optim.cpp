#include <doctest.h>

#include <cmath>

#include "bpinn/errors.hpp"
#include "bpinn/optim.hpp"

using namespace bpinn;

TEST_CASE("first Adam step is lr times the gradient sign") {
  std::vector<double> x{0.0};
  std::vector<double> g{1.0};
  AdamState s(1);
  adam_step(x, g, s, 1, AdamHyperparameters{1e-3});
  // m_hat = 1, v_hat = 1: step = lr * 1 / (1 + eps).
  CHECK(x[0] == doctest::Approx(-1e-3 / (1.0 + 1e-8)).epsilon(1e-15));
  CHECK(x[0] == doctest::Approx(-9.9999999e-4).epsilon(1e-8));
  CHECK(s.step == 1);
}

TEST_CASE("Adam: zero gradient leaves parameters unchanged") {
  std::vector<double> x{0.5, -2.0, 3.0};
  const std::vector<double> x0 = x;
  std::vector<double> g(3, 0.0);
  AdamState s(3);
  for (int t = 1; t <= 5; ++t) adam_step(x, g, s, t, AdamHyperparameters{});
  CHECK(x == x0);
}

TEST_CASE("Adam: doubling lr doubles the first update exactly") {
  const std::vector<double> g{0.3, -7.0, 1e-3};
  std::vector<double> a(3, 0.0), b(3, 0.0);
  AdamState sa(3), sb(3);
  adam_step(a, g, sa, 1, AdamHyperparameters{1e-3});
  adam_step(b, g, sb, 1, AdamHyperparameters{2e-3});
  for (int i = 0; i < 3; ++i) CHECK(b[i] == 2 * a[i]);
}

TEST_CASE("Adam rejects mismatched shapes") {
  std::vector<double> x(2), g(3);
  AdamState s(2);
  CHECK_THROWS_AS(adam_step(x, g, s, 1, AdamHyperparameters{}), ArgumentError);
  CHECK_THROWS_AS(adam_step(x, std::span<const double>(g).first(2), s, 0, AdamHyperparameters{}), ArgumentError);
}

TEST_CASE("L-BFGS on x^2") {
  const Objective f = [](std::span<const double> x, std::span<double> g) {
    g[0] = 2 * x[0];
    return x[0] * x[0];
  };
  const LbfgsResult r = lbfgs_minimize(f, {1.0}, LbfgsOptions{});
  CHECK(std::abs(r.x[0]) < 1e-8);
  CHECK(r.iterations <= 10);
  CHECK(r.status == LbfgsStatus::GradientConverged);
}

TEST_CASE("L-BFGS on the Rosenbrock function") {
  int evaluations = 0;
  const Objective f = [&](std::span<const double> x, std::span<double> g) {
    ++evaluations;
    const double a = 1 - x[0];
    const double b = x[1] - x[0] * x[0];
    g[0] = -2 * a - 400 * x[0] * b;
    g[1] = 200 * b;
    return a * a + 100 * b * b;
  };
  LbfgsOptions opt;
  opt.max_iterations = 200;
  const LbfgsResult r = lbfgs_minimize(f, {-1.2, 1.0}, opt);
  CHECK(std::abs(r.x[0] - 1) < 1e-6);
  CHECK(std::abs(r.x[1] - 1) < 1e-6);
  CHECK(r.iterations <= 200);
  // Oracle: the gradient at the returned point.
  const double a = 1 - r.x[0];
  const double b = r.x[1] - r.x[0] * r.x[0];
  CHECK(std::hypot(-2 * a - 400 * r.x[0] * b, 200 * b) < 1e-6);
  CHECK(r.evaluations == evaluations);
}

TEST_CASE("L-BFGS returns immediately on a zero gradient") {
  int evaluations = 0;
  const Objective f = [&](std::span<const double> x, std::span<double> g) {
    ++evaluations;
    g[0] = 0;
    g[1] = 0;
    return 3.0 + 0 * x[0];
  };
  const LbfgsResult r = lbfgs_minimize(f, {0.25, -4.0}, LbfgsOptions{});
  CHECK(r.iterations == 0);
  CHECK(r.x == std::vector<double>{0.25, -4.0});
  CHECK(evaluations == 1);
  CHECK(r.status == LbfgsStatus::GradientConverged);
}

TEST_CASE("L-BFGS callback can stop the iteration") {
  const Objective f = [](std::span<const double> x, std::span<double> g) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      g[i] = 2 * (i + 1) * x[i];
      s += (i + 1) * x[i] * x[i];
    }
    return s;
  };
  int calls = 0;
  const LbfgsResult r = lbfgs_minimize(f, {1, 1, 1, 1}, LbfgsOptions{}, [&](const LbfgsIterate& it) {
    CHECK(it.iteration == calls);
    ++calls;
    return it.iteration < 2;
  });
  CHECK(r.status == LbfgsStatus::StoppedByCallback);
  CHECK(calls == 3);
  CHECK(r.iterations == 2);
}

TEST_CASE("L-BFGS flags a line search that cannot make progress") {
  // Gradient points the wrong way: no step can satisfy sufficient decrease.
  int evaluations = 0;
  const Objective f = [&](std::span<const double> x, std::span<double> g) {
    ++evaluations;
    g[0] = -1.0;
    return x[0];
  };
  const LbfgsResult r = lbfgs_minimize(f, {0.0}, LbfgsOptions{});
  CHECK(r.status == LbfgsStatus::LineSearchFailed);
  CHECK(r.x[0] == 0.0);
  CHECK(r.f == 0.0);
}
