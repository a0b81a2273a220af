// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bpinn/evaluation.hpp"
#include "bpinn/io.hpp"
#include "bpinn/jet.hpp"
#include "bpinn/loss.hpp"
#include "bpinn/studies.hpp"
#include "support.hpp"

using namespace bpinn;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double median3(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

const std::vector<std::uint64_t> kSeeds = {1, 2, 3};

// Desk-scale experiment settings shared by the training criteria.
ExperimentConfig desk(std::uint64_t seed) {
  ExperimentConfig c;
  c.train.optimizer = OptimizerKind::Lbfgs;
  c.train.max_epochs = 60000;
  c.train.pressure_boundary = true;
  c.train.seed = seed;
  return c;
}

// Beltrami jets typed out by hand.
FieldJet2 beltrami_by_hand(Point2 q) {
  const double pi = M_PI;
  const double sx = std::sin(pi * q.x), cx = std::cos(pi * q.x);
  const double sy = std::sin(pi * q.y), cy = std::cos(pi * q.y);
  const double s2x = std::sin(2 * pi * q.x), c2x = std::cos(2 * pi * q.x);
  const double s2y = std::sin(2 * pi * q.y), c2y = std::cos(2 * pi * q.y);
  const double pp = pi * pi;
  FieldJet2 j;
  j.u = {-cx * sy, pi * sx * sy, -pi * cx * cy, pp * cx * sy, pi * pi * sx * cy, pp * cx * sy};
  j.v = {sx * cy, pi * cx * cy, -pi * sx * sy, -pp * sx * cy, -pp * cx * sy, -pp * sx * cy};
  j.p = {-0.25 * (c2x + c2y), 0.5 * pi * s2x, 0.5 * pi * s2y, pp * c2x, 0.0, pp * c2y};
  j.theta = {cx * cy, -pi * sx * cy, -pi * cx * sy, -pp * cx * cy, pp * sx * sy, -pp * cx * cy};
  return j;
}

Verdict criterion_manufactured() {
  const auto t0 = std::chrono::steady_clock::now();
  const FlowParameters flow;
  const DomainSpec rect;
  const CollocationSet table = hierarchical_datasets(8, rect, 2023).back();
  std::vector<Point2> points = table.domain_points;
  for (const auto& b : table.boundary_points) points.push_back(b.point);
  if (points.size() != 1536) return {false, "table set has " + std::to_string(points.size()) + " points"};
  const auto grid = test_grid(rect, 100);
  points.insert(points.end(), grid.begin(), grid.end());
  double worst = 0.0;
  double jet_mismatch = 0.0;
  for (const Point2 q : points) {
    const FieldJet2 jet = beltrami_by_hand(q);
    const FieldJet2 lib = beltrami_exact_jet(q);
    for (Field f : kFields) {
      for (int c = 0; c < kJetComponents; ++c) {
        jet_mismatch = std::max(jet_mismatch, std::abs(component(jet[f], c) - component(lib[f], c)));
      }
    }
    const Forcing fo = beltrami_forcing_bundle(q, flow);
    for (double r : domain_residual_point(jet, flow, fo.fb, fo.f)) worst = std::max(worst, r);
    for (double r : augmentation_residual_point(jet, flow, fo)) worst = std::max(worst, r);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst < 1e-20 && jet_mismatch < 1e-12 && secs < 1.0,
          "max squared residual " + fmt("%.3g", worst) + ", closed-form jet mismatch " + fmt("%.3g", jet_mismatch) +
              ", " + fmt("%.3f", secs) + " s"};
}

Verdict criterion_gradient() {
  const auto t0 = std::chrono::steady_clock::now();
  const MLPArchitecture arch = MLPArchitecture::parse("2-8-8-4");
  const DomainSpec rect;
  const FlowParameters flow;
  double worst = 0.0;
  for (std::uint64_t seed = 101; seed < 106; ++seed) {
    testing::Draw d(seed);
    CollocationSet set;
    for (int i = 0; i < 12; ++i) set.domain_points.push_back({d.range(-1, 1), d.range(-1, 1)});
    for (Edge e : kEdges) {
      const double t = d.range(-1, 1);
      Point2 q{t, -1.0};
      if (e == Edge::North) q = {t, 1.0};
      if (e == Edge::West) q = {-1.0, t};
      if (e == Edge::East) q = {1.0, t};
      set.boundary_points.push_back({q, e, beltrami_exact(q)});
    }
    std::vector<double> x = testing::random_vector(parameter_count(arch), seed * 7919, 0.8);
    for (bool augmented : {true, false}) {
      const LossProblem problem(set, flow, beltrami_forcing_provider(), {augmented, false});
      const LossEvaluation ev = loss_gradient(arch, x, problem);
      const double h = 1e-5;
      std::vector<double> fd(x.size());
      double scale = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i];
        x[i] = x0 + h;
        const double fp = evaluate_loss(arch, x, problem).r_total;
        x[i] = x0 - h;
        const double fm = evaluate_loss(arch, x, problem).r_total;
        x[i] = x0;
        fd[i] = (fp - fm) / (2 * h);
        scale = std::max(scale, std::abs(fd[i]));
      }
      for (std::size_t i = 0; i < x.size(); ++i) {
        worst = std::max(worst, testing::rel_error(ev.gradient[i], fd[i], 1e-3 * scale));
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst < 1e-5 && secs < 30.0,
          "max relative component error " + fmt("%.3g", worst) + ", " + fmt("%.2f", secs) + " s"};
}

Verdict criterion_jets() {
  const MLPArchitecture arch = MLPArchitecture::parse("2-32-32-4");
  const std::vector<double> params = testing::random_vector(parameter_count(arch), 2024, 0.4);
  testing::Draw d(77);
  const auto f = [&](double x, double y) {
    const FieldState s = forward(arch, params, {x, y});
    return std::array<double, 4>{s.u, s.v, s.p, s.theta};
  };
  std::vector<std::array<double, 5>> jets;
  std::vector<std::array<double, 5>> fds;
  const double h1 = 1e-5;
  const double h2 = 1e-3;
  // Second differences with spacing h, per field: (xx, xy, yy).
  const auto second_differences = [&](Point2 q, double h) {
    const auto c = f(q.x, q.y);
    const auto px = f(q.x + h, q.y), mx = f(q.x - h, q.y), py = f(q.x, q.y + h), my = f(q.x, q.y - h);
    const auto pp = f(q.x + h, q.y + h), pm = f(q.x + h, q.y - h);
    const auto mp = f(q.x - h, q.y + h), mm = f(q.x - h, q.y - h);
    std::array<std::array<double, 3>, 4> out{};
    for (std::size_t k = 0; k < 4; ++k) {
      out[k] = {(px[k] - 2 * c[k] + mx[k]) / (h * h), (pp[k] - pm[k] - mp[k] + mm[k]) / (4 * h * h),
                (py[k] - 2 * c[k] + my[k]) / (h * h)};
    }
    return out;
  };
  for (int n = 0; n < 100; ++n) {
    const Point2 q{d.range(-1, 1), d.range(-1, 1)};
    const FieldJet2 jet = evaluate_jet(arch, params, q);
    const auto px = f(q.x + h1, q.y), mx = f(q.x - h1, q.y), py = f(q.x, q.y + h1), my = f(q.x, q.y - h1);
    // Richardson extrapolation of the h2 and h2/2 differences.
    const auto coarse = second_differences(q, h2);
    const auto fine = second_differences(q, h2 / 2);
    for (Field fl : kFields) {
      const auto k = static_cast<std::size_t>(fl);
      const Jet2& j = jet[fl];
      jets.push_back({j.dx, j.dy, j.dxx, j.dxy, j.dyy});
      std::array<double, 5> fd{(px[k] - mx[k]) / (2 * h1), (py[k] - my[k]) / (2 * h1)};
      for (std::size_t i = 0; i < 3; ++i) fd[2 + i] = (4 * fine[k][i] - coarse[k][i]) / 3;
      fds.push_back(fd);
    }
  }
  std::array<double, 5> scale{};
  for (const auto& v : fds) {
    for (std::size_t i = 0; i < 5; ++i) scale[i] = std::max(scale[i], std::abs(v[i]));
  }
  double first = 0.0;
  double second = 0.0;
  for (std::size_t n = 0; n < jets.size(); ++n) {
    for (std::size_t i = 0; i < 5; ++i) {
      const double e = testing::rel_error(jets[n][i], fds[n][i], 1e-3 * scale[i]);
      if (i < 2) {
        first = std::max(first, e);
      } else {
        second = std::max(second, e);
      }
    }
  }
  return {first < 1e-5 && second < 1e-4,
          "first derivatives " + fmt("%.3g", first) + ", second derivatives " + fmt("%.3g", second)};
}

// Criteria 4 and 6 share one convergence study per seed.
struct DeskStudies {
  std::map<std::uint64_t, std::vector<StudyCell>> cells;
};

DeskStudies run_desk_studies() {
  DeskStudies s;
  for (std::uint64_t seed : kSeeds) {
    ExperimentConfig c = desk(seed);
    c.study.levels = {5};
    c.study.thresholds = {1e-1, 1e-2, 1e-3};
    s.cells[seed] = convergence_study(c);
  }
  return s;
}

Verdict criterion_slopes(const DeskStudies& s) {
  std::array<std::vector<double>, 4> slopes;
  for (const auto& [seed, cells] : s.cells) {
    std::array<double, 4> per_field;
    per_field.fill(std::nan(""));
    for (const auto& fit : fit_study(cells)) {
      if (fit.abscissa == AbscissaKind::TrainingError && fit.norm == "l2" && fit.fit.points == 3) {
        per_field[static_cast<std::size_t>(fit.field)] = fit.fit.slope;
      }
    }
    for (std::size_t f = 0; f < 4; ++f) slopes[f].push_back(per_field[f]);
  }
  int inside = 0;
  std::string detail;
  for (Field f : kFields) {
    const double m = median3(slopes[static_cast<std::size_t>(f)]);
    if (m >= 0.25 && m <= 0.75) ++inside;
    detail += std::string(field_name(f)) + " " + fmt("%.3f", m) + " ";
  }
  return {inside >= 3, "median L2 slopes: " + detail + "(" + std::to_string(inside) + "/4 in [0.25, 0.75])"};
}

Verdict criterion_monotone(const DeskStudies& s) {
  const std::array<double, 3> thresholds = {1e-1, 1e-2, 1e-3};
  bool ok = true;
  int unconverged = 0;
  std::string detail;
  for (Field f : kFields) {
    std::array<double, 3> med{};
    for (std::size_t t = 0; t < 3; ++t) {
      std::vector<double> v;
      for (const auto& [seed, cells] : s.cells) {
        for (const auto& cell : cells) {
          if (cell.threshold != thresholds[t]) continue;
          v.push_back(cell.report[f].w0_inf);
          if (!cell.converged()) ++unconverged;
        }
      }
      med[t] = median3(v);
    }
    ok = ok && med[1] <= med[0] && med[2] <= med[1];
    detail += std::string(field_name(f)) + " " + fmt("%.3g", med[0]) + ">" + fmt("%.3g", med[1]) + ">" +
              fmt("%.3g", med[2]) + " ";
  }
  if (unconverged > 0) detail += "(" + std::to_string(unconverged / 4) + " N.C. cells)";
  return {ok && unconverged == 0, "median W0 by threshold: " + detail};
}

Verdict criterion_augmentation() {
  std::vector<double> ratios;
  std::string detail;
  bool all_converged = true;
  for (std::uint64_t seed : kSeeds) {
    std::array<double, 2> p_w0{};
    for (bool augmented : {true, false}) {
      ExperimentConfig c = desk(seed);
      c.dataset.level = 6;
      c.train.threshold = 1e-3;
      c.train.augmented = augmented;
      const RunOutcome run = run_training(c);
      all_converged = all_converged && run.result.history.status == TrainStatus::Converged;
      p_w0[augmented ? 0 : 1] = run.assessment.report[Field::P].w0_inf;
    }
    ratios.push_back(p_w0[0] / p_w0[1]);
    detail += fmt("%.3g", p_w0[0]) + "/" + fmt("%.3g", p_w0[1]) + " ";
  }
  const double m = median3(ratios);
  return {m <= 0.5 && all_converged, "pressure W0 augmented/bare per seed " + detail + "median ratio " +
                                         fmt("%.3f", m) + (all_converged ? "" : " (some runs N.C.)")};
}

bool stratified(std::span<const double> t, double lo, double hi) {
  const std::size_t n = t.size();
  std::vector<int> hits(n, 0);
  for (double x : t) {
    if (x < lo || x > hi) return false;
    auto k = static_cast<std::size_t>(std::floor((x - lo) / (hi - lo) * static_cast<double>(n)));
    ++hits[std::min(k, n - 1)];
  }
  return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

Verdict criterion_datasets() {
  const DomainSpec rect;
  const auto sets = hierarchical_datasets(8, rect, 2023);
  std::vector<std::string> problems;
  const std::array<std::size_t, 8> totals = {12, 24, 48, 96, 192, 384, 768, 1536};
  for (int k = 0; k < 8; ++k) {
    const auto& s = sets[static_cast<std::size_t>(k)];
    const std::size_t nd = 8u << k;
    const std::size_t ne = 1u << k;
    if (s.size() != totals[static_cast<std::size_t>(k)] || s.domain_points.size() != nd ||
        s.boundary_points.size() != 4 * ne) {
      problems.push_back("size at level " + std::to_string(k));
    }
    // Domain increment (or the whole level-0 set) is a Latin hypercube.
    const std::size_t d0 = k == 0 ? 0 : nd / 2;
    std::vector<double> xs, ys;
    for (std::size_t i = d0; i < nd && i < s.domain_points.size(); ++i) {
      xs.push_back(s.domain_points[i].x);
      ys.push_back(s.domain_points[i].y);
    }
    if (!stratified(xs, rect.x_min, rect.x_max) || !stratified(ys, rect.y_min, rect.y_max)) {
      problems.push_back("domain stratification at level " + std::to_string(k));
    }
    for (Edge e : kEdges) {
      std::vector<double> along;
      for (const auto& b : s.boundary_points) {
        if (b.edge != e) continue;
        const bool horizontal = e == Edge::South || e == Edge::North;
        const double fixed = horizontal ? b.point.y : b.point.x;
        const double expected = e == Edge::South ? rect.y_min
                                : e == Edge::North ? rect.y_max
                                : e == Edge::West  ? rect.x_min
                                                   : rect.x_max;
        if (fixed != expected) problems.push_back("edge point off its edge at level " + std::to_string(k));
        along.push_back(horizontal ? b.point.x : b.point.y);
      }
      if (along.size() != ne) {
        problems.push_back("edge count at level " + std::to_string(k));
        continue;
      }
      const std::size_t e0 = k == 0 ? 0 : ne / 2;
      if (!stratified(std::span<const double>(along).subspan(e0), -1.0, 1.0)) {
        problems.push_back("edge stratification at level " + std::to_string(k));
      }
    }
    if (k > 0) {
      const auto& prev = sets[static_cast<std::size_t>(k - 1)];
      for (std::size_t i = 0; i < prev.domain_points.size(); ++i) {
        const Point2 a = prev.domain_points[i], b = s.domain_points[i];
        if (std::bit_cast<std::uint64_t>(a.x) != std::bit_cast<std::uint64_t>(b.x) ||
            std::bit_cast<std::uint64_t>(a.y) != std::bit_cast<std::uint64_t>(b.y)) {
          problems.push_back("domain nesting at level " + std::to_string(k));
          break;
        }
      }
      // Boundary nesting: the previous level's points, per edge, form a prefix.
      for (Edge e : kEdges) {
        std::vector<Point2> a, b;
        for (const auto& p : prev.boundary_points) {
          if (p.edge == e) a.push_back(p.point);
        }
        for (const auto& p : s.boundary_points) {
          if (p.edge == e) b.push_back(p.point);
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
          if (i >= b.size() || std::bit_cast<std::uint64_t>(a[i].x) != std::bit_cast<std::uint64_t>(b[i].x) ||
              std::bit_cast<std::uint64_t>(a[i].y) != std::bit_cast<std::uint64_t>(b[i].y)) {
            problems.push_back("boundary nesting at level " + std::to_string(k));
            break;
          }
        }
      }
    }
  }
  const auto [train, validation] = split_validation(sets[4], 0.15, 99);
  const std::size_t vsize = validation.size();
  if (vsize != 29 || train.size() != 163) problems.push_back("validation split size " + std::to_string(vsize));
  if (problems.empty()) {
    return {true, "sizes 12..1536, bitwise nesting, stratified increments, 29 of 192 held out"};
  }
  std::string detail;
  for (const auto& p : problems) detail += p + "; ";
  return {false, detail};
}

Verdict criterion_transfer() {
  std::vector<double> ratios;
  std::string detail;
  bool ok = true;
  for (std::uint64_t seed : kSeeds) {
    ExperimentConfig source = desk(seed);
    source.train.threshold = 1e-2;
    const RunOutcome run = run_training(source);
    if (run.result.history.status != TrainStatus::Converged) {
      ok = false;
      detail += "source N.C. ";
      continue;
    }
    ExperimentConfig target = source;
    target.flow.nu = 0.5;
    const TransferOutcome t = run_transfer(make_checkpoint(run, source), target, true);
    ok = ok && t.warm.history.status == TrainStatus::Converged;
    const double ratio = static_cast<double>(t.warm.history.epochs_used) / t.cold->history.epochs_used;
    ratios.push_back(ratio);
    detail += std::to_string(t.warm.history.epochs_used) + "/" + std::to_string(t.cold->history.epochs_used) +
              (t.cold->history.status == TrainStatus::Converged ? "" : " (cold N.C.)") + " ";
  }
  if (ratios.size() != kSeeds.size()) return {false, detail};
  const double m = median3(ratios);
  return {ok && m <= 0.67, "warm/cold iterations per seed " + detail + "median ratio " + fmt("%.3f", m)};
}

Verdict criterion_determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "bpinn-acceptance-determinism";
  std::filesystem::remove_all(dir);
  const std::string cmd = std::string("\"") + BPINN_CLI_PATH + "\" train --seed 7 --set train.max_epochs=300 --out \"" +
                          dir.string() + "\" > /dev/null 2>&1";
  std::array<std::string, 2> metrics, checkpoints;
  for (int run = 0; run < 2; ++run) {
    if (std::system(cmd.c_str()) != 0) return {false, "bpinn train exited with an error"};
    metrics[run] = read_text_file(dir / "metrics.csv");
    checkpoints[run] = read_text_file(dir / "checkpoint.json");
  }
  const bool same = metrics[0] == metrics[1] && checkpoints[0] == checkpoints[1];
  return {same && !metrics[0].empty(), same ? "metrics.csv and checkpoint.json byte-identical across two processes"
                                            : "outputs differ between runs"};
}

bool within_ulps(double a, double b, int ulps) {
  double hi = std::max(a, b);
  double lo = std::min(a, b);
  for (int i = 0; i < ulps && lo < hi; ++i) lo = std::nextafter(lo, hi);
  return lo == hi;
}

Verdict criterion_decomposition() {
  std::size_t epochs = 0;
  std::string detail;
  bool ok = true;
  for (const auto& [optimizer, augmented, pressure] : {std::tuple{OptimizerKind::Adam, true, false},
                                                       std::tuple{OptimizerKind::Lbfgs, true, true},
                                                       std::tuple{OptimizerKind::Adam, false, false}}) {
    ExperimentConfig c;
    c.dataset.level = 3;
    c.grid_n = 10;
    c.train.optimizer = optimizer;
    c.train.augmented = augmented;
    c.train.pressure_boundary = pressure;
    c.train.max_epochs = 200;
    c.train.threshold = 0.0;
    const RunOutcome run = run_training(c);
    for (const auto& rec : run.result.history.records) {
      const ResidualBreakdown& b = rec.breakdown;
      double sum = b.r_u + b.r_v + b.r_div + b.r_theta + b.r_u_b + b.r_v_b + b.r_theta_b;
      if (pressure) sum += b.r_p_b;
      if (augmented) sum += b.r_p + b.r_div_x + b.r_div_y;
      ok = ok && within_ulps(b.r_total, sum, 8);
      ++epochs;
    }
    // Domain and boundary series as exported for plotting.
    const std::string csv = metrics_csv(run.result.history, {"train", to_json(c), c.train.seed});
    std::istringstream in(csv);
    std::string line;
    std::vector<std::string> header;
    std::size_t row = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> cols;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) cols.push_back(cell);
      if (header.empty()) {
        header = cols;
        continue;
      }
      const auto col = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        return static_cast<std::size_t>(it - header.begin());
      };
      const auto& b = run.result.history.records[row++].breakdown;
      ok = ok && col("r_domain") < cols.size() && col("r_boundary_total") < cols.size() &&
           std::stod(cols[col("r_domain")]) == b.r_domain && std::stod(cols[col("r_boundary_total")]) == b.r_boundary;
    }
    ok = ok && row == run.result.history.records.size();
  }
  return {ok, std::to_string(epochs) + " logged epochs checked; domain and boundary columns present in metrics.csv"};
}

Verdict criterion_norms() {
  const auto grid = test_grid(DomainSpec{}, 100);
  const JetFunction exact = [](Point2 q) { return beltrami_exact_jet(q); };
  const auto perturbed = [](std::function<void(Point2, FieldJet2&)> edit) {
    return JetFunction([edit](Point2 q) {
      FieldJet2 j = beltrami_exact_jet(q);
      edit(q, j);
      return j;
    });
  };
  std::string failed;
  const auto expect = [&](bool cond, const char* what) {
    if (!cond) failed += std::string(what) + "; ";
  };

  // Constant offset on theta: values only.
  const auto offset = perturbed([](Point2, FieldJet2& j) { j.theta.value += 0.1; });
  double mx = 0.0;
  double sq = 0.0;
  for (const Point2 q : grid) {
    const double t = beltrami_exact_jet(q).theta.value;
    const double d = std::abs((t + 0.1) - t);
    mx = std::max(mx, d);
    sq += d * d;
  }
  const double rms = std::sqrt(sq / static_cast<double>(grid.size()));
  for (int k = 0; k <= 2; ++k) {
    const PerField e = sobolev_error(offset, exact, grid, k);
    expect(e[3] == mx && e[0] == 0.0 && e[1] == 0.0 && e[2] == 0.0, "offset W norms");
  }
  const PerField l2 = l2_error(offset, exact, grid);
  expect(l2[0] == 0.0 && l2[1] == 0.0 && l2[2] == 0.0 && std::abs(l2[3] - rms) <= 4 * 0x1p-52 * rms, "offset L2");
  expect(std::abs(mx - 0.1) < 1e-15 && std::abs(rms - 0.1) < 1e-12, "offset oracle");

  // Single u_x spike of 0.3 at the first grid point, where u_x vanishes.
  const Point2 spike = grid[0];
  const auto spiked = perturbed([spike](Point2 q, FieldJet2& j) {
    if (q == spike) j.u.dx += 0.3;
  });
  const double ux = beltrami_exact_jet(spike).u.dx;
  const double expected = std::abs((ux + 0.3) - ux);
  expect(expected == 0.3, "spike oracle");
  expect(sobolev_error(spiked, exact, grid, 0)[0] == 0.0, "spike W0");
  expect(sobolev_error(spiked, exact, grid, 1)[0] == expected, "spike W1");
  expect(sobolev_error(spiked, exact, grid, 2)[0] == expected, "spike W2");
  expect(l2_error(spiked, exact, grid)[0] == 0.0, "spike L2");

  // Linear offset 0.1 x on theta.
  const auto linear = perturbed([](Point2 q, FieldJet2& j) {
    j.theta.value += 0.1 * q.x;
    j.theta.dx += 0.1;
  });
  double s2 = 0.0;
  for (const Point2 q : grid) s2 += (0.1 * q.x) * (0.1 * q.x);
  const double oracle = std::sqrt(s2 / static_cast<double>(grid.size()));
  const double lin = l2_error(linear, exact, grid)[3];
  // Mean of x^2 over n equispaced nodes on [-1, 1] is (n + 1) / (3 (n - 1)).
  const double closed = 0.1 * std::sqrt(101.0 / 297.0);
  expect(std::abs(lin - oracle) < 1e-12 && std::abs(oracle - closed) < 1e-15, "linear-offset L2");

  return {failed.empty(), (failed.empty() ? std::string() : "failed: " + failed) + "offset W(0,1,2) = " + fmt("%.17g", mx) + ", spike W1 = W2 = " + fmt("%.17g", expected) +
                  ", linear-offset L2 = " + fmt("%.6f", lin)};
}

}  // namespace

// Optional arguments select criteria by number; default runs all.
int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  const auto wanted = [&](int n) {
    return selected.empty() || std::find(selected.begin(), selected.end(), n) != selected.end();
  };
  int failures = 0;
  const auto report = [&](int n, const std::string& name, const std::function<Verdict()>& check) {
    if (!wanted(n)) return;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failures;
    std::printf("criterion %2d %s: %s | %s [%.1f s]\n", n, v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str(),
                secs);
    std::fflush(stdout);
  };

  report(1, "manufactured-solution residuals", criterion_manufactured);
  report(2, "loss gradient vs finite differences", criterion_gradient);
  report(3, "jets vs finite differences", criterion_jets);
  DeskStudies studies;
  std::string study_error;
  double study_secs = 0.0;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    if (wanted(4) || wanted(6)) studies = run_desk_studies();
    study_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  } catch (const std::exception& e) {
    study_error = e.what();
  }
  report(4, "L2 error vs training error slopes", [&]() -> Verdict {
    if (!study_error.empty()) return {false, "exception: " + study_error};
    Verdict v = criterion_slopes(studies);
    v.detail += ", 3 studies took " + fmt("%.0f", study_secs) + " s";
    v.pass = v.pass && study_secs < 1800.0;
    return v;
  });
  report(5, "augmentation ablation, pressure W0", criterion_augmentation);
  report(6, "W0 monotone in threshold", [&]() -> Verdict {
    if (!study_error.empty()) return {false, "exception: " + study_error};
    return criterion_monotone(studies);
  });
  report(7, "dataset machinery", criterion_datasets);
  report(8, "transfer learning nu 1 -> 0.5", criterion_transfer);
  report(9, "CLI determinism", criterion_determinism);
  report(10, "residual decomposition", criterion_decomposition);
  report(11, "norm calculus", criterion_norms);
  return failures == 0 ? 0 : 1;
}
