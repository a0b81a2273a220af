#include "bpinn/studies.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "bpinn/errors.hpp"
#include "bpinn/jet.hpp"
#include "bpinn/rng.hpp"

namespace bpinn {

using nlohmann::json;

MLPArchitecture experiment_architecture(const ExperimentConfig& c) { return MLPArchitecture::parse(c.architecture); }

CollocationSet experiment_dataset(const ExperimentConfig& c, int level) {
  auto sets = hierarchical_datasets(level + 1, c.domain, c.dataset.seed);
  return std::move(sets.back());
}

Assessment assess(const MLPArchitecture& arch, const ParameterVector& params, const ExperimentConfig& c) {
  Assessment a;
  a.report = error_report(arch, params, c.domain, c.grid_n);
  const auto grid = test_grid(c.domain, c.grid_n);
  const auto boundary = boundary_grid(c.domain, c.grid_n);
  a.generalization_error = estimate_generalization_error(arch, params, grid, boundary, c.flow);
  return a;
}

RunOutcome run_training(const ExperimentConfig& c, const EpochObserver& observer) {
  c.validate();
  RunOutcome out{experiment_architecture(c), experiment_dataset(c, c.dataset.level), {}, {}};
  out.result = train(out.arch, init_parameters(out.arch, c.train.seed), out.dataset, c.flow,
                     beltrami_forcing_provider(), c.train, observer);
  out.assessment = assess(out.arch, out.result.params, c);
  return out;
}

Checkpoint make_checkpoint(const RunOutcome& run, const ExperimentConfig& c) {
  return Checkpoint{run.arch,          c.train.seed,     run.result.params,
                    run.result.adam_state, to_json(c),   run.result.history.status,
                    run.result.history.epochs_used};
}

std::vector<StudyCell> convergence_study(const ExperimentConfig& c, const ProgressSink& progress) {
  c.validate();
  if (c.study.thresholds.empty() || c.study.levels.empty()) {
    throw ConfigError("convergence study needs at least one threshold and one level");
  }
  const MLPArchitecture arch = experiment_architecture(c);
  std::vector<double> thresholds = c.study.thresholds;
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());

  std::vector<StudyCell> cells;
  for (int level : c.study.levels) {
    const CollocationSet data = experiment_dataset(c, level);
    TrainConfig tc = c.train;
    tc.threshold = thresholds.back();

    std::vector<std::optional<StudyCell>> taken(thresholds.size());
    const auto make_cell = [&](double t, TrainStatus status, int epochs, double r_total,
                               const ParameterVector& params) {
      const Assessment a = assess(arch, params, c);
      return StudyCell{level, data.domain_points.size(), data.boundary_points.size(), t, status, epochs, r_total,
                       a.generalization_error, a.report};
    };
    const EpochObserver observer = [&](const EpochRecord& rec, std::span<const double> params) {
      for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (taken[i] || !(rec.breakdown.r_total <= thresholds[i])) continue;
        taken[i] = make_cell(thresholds[i], TrainStatus::Converged, rec.epoch, rec.breakdown.r_total,
                             ParameterVector(std::vector<double>(params.begin(), params.end())));
      }
    };
    const TrainResult r = train(arch, init_parameters(arch, c.train.seed), data, c.flow,
                                beltrami_forcing_provider(), tc, observer);
    const double final_total = r.history.records.empty() ? 0.0 : r.history.records.back().breakdown.r_total;
    std::optional<StudyCell> unmet;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      if (!taken[i]) {
        if (!unmet) unmet = make_cell(thresholds[i], r.history.status, r.history.epochs_used, final_total, r.params);
        StudyCell cell = *unmet;
        cell.threshold = thresholds[i];
        taken[i] = cell;
      }
      cells.push_back(*taken[i]);
      if (progress) {
        const auto& cell = *taken[i];
        progress("level " + std::to_string(level) + " (" + std::to_string(cell.points()) + " points), threshold " +
                 format_double(cell.threshold) + ": " +
                 (cell.converged() ? "epoch " + std::to_string(cell.epochs) : std::string("N.C.")));
      }
    }
  }
  return cells;
}

double norm_value(const FieldErrors& e, std::string_view norm) {
  if (norm == "w0_inf") return e.w0_inf;
  if (norm == "w1_inf") return e.w1_inf;
  if (norm == "w2_inf") return e.w2_inf;
  if (norm == "l2") return e.l2;
  throw ArgumentError("unknown norm '" + std::string(norm) + "'");
}

std::vector<StudyFit> fit_study(std::span<const StudyCell> cells) {
  std::map<int, std::vector<const StudyCell*>> by_level;
  std::map<double, std::vector<const StudyCell*>> by_threshold;
  for (const auto& cell : cells) {
    if (!cell.converged()) continue;
    by_level[cell.level].push_back(&cell);
    by_threshold[cell.threshold].push_back(&cell);
  }
  std::vector<StudyFit> fits;
  const auto try_fit = [&](const std::vector<const StudyCell*>& group, AbscissaKind kind, double fixed) {
    for (Field f : kFields) {
      for (std::string_view norm : kNormNames) {
        std::vector<std::pair<double, double>> pts;
        for (const StudyCell* cell : group) {
          const double a = kind == AbscissaKind::TrainingError ? cell->r_total : static_cast<double>(cell->points());
          const double e = norm_value(cell->report[f], norm);
          if (a > 0.0 && e > 0.0 && std::isfinite(a) && std::isfinite(e)) pts.emplace_back(a, e);
        }
        std::sort(pts.begin(), pts.end());
        if (pts.size() < 2 || pts.front().first == pts.back().first) continue;
        fits.push_back({f, std::string(norm), kind, fixed, fit_convergence(pts, kind)});
      }
    }
  };
  for (const auto& [level, group] : by_level) try_fit(group, AbscissaKind::TrainingError, level);
  for (const auto& [t, group] : by_threshold) try_fit(group, AbscissaKind::CollocationCount, t);
  return fits;
}

std::string study_table_csv(std::span<const StudyCell> cells, const Provenance& p) {
  std::string out = csv_header_lines(p);
  out += "level,points,domain_points,boundary_points,threshold,status,converged,epochs,r_total,e_G";
  for (Field f : kFields) {
    for (std::string_view norm : kNormNames) out += "," + std::string(field_name(f)) + "_" + std::string(norm);
  }
  out += '\n';
  for (const auto& c : cells) {
    out += std::to_string(c.level) + ',' + std::to_string(c.points()) + ',' + std::to_string(c.domain_points) + ',' +
           std::to_string(c.boundary_points) + ',' + format_double(c.threshold) + ',' +
           std::string(train_status_name(c.status)) + ',' + (c.converged() ? "yes" : "N.C.") + ',' +
           std::to_string(c.epochs) + ',' + format_double(c.r_total) + ',' + format_double(c.generalization_error);
    for (Field f : kFields) {
      for (std::string_view norm : kNormNames) out += ',' + format_double(norm_value(c.report[f], norm));
    }
    out += '\n';
  }
  return out;
}

json study_fits_json(std::span<const StudyFit> fits, const Provenance& p) {
  json doc = json::object();
  add_provenance(doc, p);
  json arr = json::array();
  for (const auto& f : fits) {
    json e{{"field", std::string(field_name(f.field))},
           {"norm", f.norm},
           {"abscissa", std::string(abscissa_name(f.abscissa))},
           {"slope", f.fit.slope},
           {"intercept", f.fit.intercept},
           {"r_squared", f.fit.r_squared},
           {"rate", f.fit.rate()},
           {"points", f.fit.points}};
    if (f.abscissa == AbscissaKind::TrainingError) {
      e["level"] = static_cast<int>(f.fixed);
    } else {
      e["threshold"] = f.fixed;
    }
    arr.push_back(std::move(e));
  }
  doc["fits"] = std::move(arr);
  return doc;
}

std::vector<ArchitectureCell> architecture_study(const ExperimentConfig& c, const ProgressSink& progress) {
  c.validate();
  std::vector<ArchitectureCell> cells;
  for (const auto& name : c.study.architectures) {
    const MLPArchitecture arch = MLPArchitecture::parse(name);
    for (int level : c.study.levels) {
      const CollocationSet data = experiment_dataset(c, level);
      const TrainResult r =
          train(arch, init_parameters(arch, c.train.seed), data, c.flow, beltrami_forcing_provider(), c.train);
      cells.push_back({arch.to_string(), arch.parameter_count(), level, data.size(), r.history.status,
                       r.history.epochs_used});
      if (progress) {
        progress(arch.to_string() + ", " + std::to_string(data.size()) + " points: " +
                 (r.history.status == TrainStatus::Converged ? "epoch " + std::to_string(r.history.epochs_used)
                                                             : std::string("N.C.")));
      }
    }
  }
  return cells;
}

std::string architecture_heatmap_csv(std::span<const ArchitectureCell> cells, const Provenance& p) {
  std::vector<std::string> archs;
  std::vector<std::pair<int, std::size_t>> levels;
  for (const auto& c : cells) {
    if (std::find(archs.begin(), archs.end(), c.architecture) == archs.end()) archs.push_back(c.architecture);
    const std::pair<int, std::size_t> key{c.level, c.points};
    if (std::find(levels.begin(), levels.end(), key) == levels.end()) levels.push_back(key);
  }
  std::string out = csv_header_lines(p);
  out += "architecture,parameters";
  for (const auto& [level, points] : levels) out += ",n" + std::to_string(points);
  out += '\n';
  for (const auto& a : archs) {
    std::string row = a;
    std::size_t params = 0;
    std::string tail;
    for (const auto& [level, points] : levels) {
      tail += ',';
      for (const auto& c : cells) {
        if (c.architecture != a || c.level != level) continue;
        params = c.parameters;
        tail += c.status == TrainStatus::Converged ? std::to_string(c.epochs) : std::string("N.C.");
      }
    }
    out += row + ',' + std::to_string(params) + tail + '\n';
  }
  return out;
}

TransferOutcome run_transfer(const Checkpoint& checkpoint, const ExperimentConfig& target, bool cold_baseline) {
  target.validate();
  const MLPArchitecture arch = experiment_architecture(target);
  CollocationSet data = experiment_dataset(target, target.dataset.level);
  TransferOutcome out{arch, data, {}, {}, std::nullopt, std::nullopt};
  out.warm = transfer_learn(checkpoint.architecture, checkpoint.params, arch, data, target.flow,
                            beltrami_forcing_provider(), target.train);
  out.warm_assessment = assess(arch, out.warm.params, target);
  if (cold_baseline) {
    out.cold = train(arch, init_parameters(arch, target.train.seed), data, target.flow, beltrami_forcing_provider(),
                     target.train);
    out.cold_assessment = assess(arch, out.cold->params, target);
  }
  return out;
}

namespace {

json run_summary(const TrainResult& r, const Assessment& a) {
  return json{{"status", std::string(train_status_name(r.history.status))},
              {"epochs_used", r.history.epochs_used},
              {"final_r_total", r.history.records.empty() ? 0.0 : r.history.records.back().breakdown.r_total},
              {"generalization_error", a.generalization_error},
              {"errors", error_report_json(a.report)}};
}

}  // namespace

json transfer_summary_json(const TransferOutcome& t, const Provenance& p) {
  json doc = json::object();
  add_provenance(doc, p);
  doc["architecture"] = t.arch.to_string();
  doc["warm"] = run_summary(t.warm, t.warm_assessment);
  if (t.cold) {
    doc["cold"] = run_summary(*t.cold, *t.cold_assessment);
    const int cold_epochs = t.cold->history.epochs_used;
    doc["epoch_ratio"] = cold_epochs > 0 ? static_cast<double>(t.warm.history.epochs_used) / cold_epochs : 0.0;
  }
  return doc;
}

bool VerificationReport::passed() const {
  return manufactured_residual_max < 1e-20 && gradient_max_relative_error < 1e-5 &&
         jet_first_max_relative_error < 1e-5 && jet_second_max_relative_error < 1e-4;
}

namespace {

double manufactured_check() {
  const FlowParameters flow;
  const DomainSpec rect;
  auto points = hierarchical_datasets(8, rect, 2023).back().domain_points;
  const auto grid = test_grid(rect, 100);
  points.insert(points.end(), grid.begin(), grid.end());
  double worst = 0.0;
  for (const Point2 q : points) {
    const FieldJet2 jet = beltrami_exact_jet(q);
    const Forcing fo = beltrami_forcing_bundle(q, flow);
    for (double r : domain_residual_point(jet, flow, fo.fb, fo.f)) worst = std::max(worst, r);
    for (double r : augmentation_residual_point(jet, flow, fo)) worst = std::max(worst, r);
  }
  return worst;
}

// |a - b| relative to the larger magnitude, floored at `floor`.
double rel_err(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

double gradient_check(std::uint64_t seed) {
  const MLPArchitecture arch = MLPArchitecture::parse("2-8-8-4");
  const DomainSpec rect;
  const FlowParameters flow;
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const std::uint64_t s = derive_seed(seed, 0x900 + trial);
    CollocationSet set;
    set.domain_points = latin_hypercube(12, rect, derive_seed(s, 1));
    for (Edge e : kEdges) {
      for (const Point2 q : edge_latin_hypercube(1, rect, e, derive_seed(s, 2 + static_cast<int>(e)))) {
        set.boundary_points.push_back({q, e, beltrami_exact(q)});
      }
    }
    const ParameterVector params = init_parameters(arch, s);
    for (bool augmented : {true, false}) {
      const LossProblem problem(set, flow, beltrami_forcing_provider(), {augmented, false});
      const LossEvaluation ev = loss_gradient(arch, params.values(), problem);
      std::vector<double> fd(params.size());
      std::vector<double> x(params.values().begin(), params.values().end());
      const double h = 1e-5;
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
      for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, rel_err(ev.gradient[i], fd[i], 1e-3 * scale));
    }
  }
  return worst;
}

std::pair<double, double> jet_check(std::uint64_t seed) {
  const MLPArchitecture arch = MLPArchitecture::parse("2-32-32-4");
  const ParameterVector params = init_parameters(arch, derive_seed(seed, 0xa00));
  const auto points = latin_hypercube(100, DomainSpec{}, derive_seed(seed, 0xa01));
  const auto f = [&](double x, double y) {
    const FieldState s = forward(arch, params, {x, y});
    return std::array<double, 4>{s.u, s.v, s.p, s.theta};
  };
  std::vector<std::array<double, 5>> jet_vals;
  std::vector<std::array<double, 5>> fd_vals;
  for (const Point2 q : points) {
    const FieldJet2 jet = evaluate_jet(arch, params, q);
    const double h1 = 1e-5;
    const double h2 = 1e-3;
    const auto px = f(q.x + h1, q.y), mx = f(q.x - h1, q.y), py = f(q.x, q.y + h1), my = f(q.x, q.y - h1);
    const auto c = f(q.x, q.y);
    const auto px2 = f(q.x + h2, q.y), mx2 = f(q.x - h2, q.y), py2 = f(q.x, q.y + h2), my2 = f(q.x, q.y - h2);
    const auto pp = f(q.x + h2, q.y + h2), pm = f(q.x + h2, q.y - h2), mp = f(q.x - h2, q.y + h2),
               mm = f(q.x - h2, q.y - h2);
    for (Field fl : kFields) {
      const auto k = static_cast<std::size_t>(fl);
      const Jet2& j = jet[fl];
      jet_vals.push_back({j.dx, j.dy, j.dxx, j.dxy, j.dyy});
      fd_vals.push_back({(px[k] - mx[k]) / (2 * h1), (py[k] - my[k]) / (2 * h1),
                         (px2[k] - 2 * c[k] + mx2[k]) / (h2 * h2), (pp[k] - pm[k] - mp[k] + mm[k]) / (4 * h2 * h2),
                         (py2[k] - 2 * c[k] + my2[k]) / (h2 * h2)});
    }
  }
  std::array<double, 5> scale{};
  for (const auto& v : jet_vals) {
    for (std::size_t i = 0; i < 5; ++i) scale[i] = std::max(scale[i], std::abs(v[i]));
  }
  double first = 0.0;
  double second = 0.0;
  for (std::size_t n = 0; n < jet_vals.size(); ++n) {
    for (std::size_t i = 0; i < 5; ++i) {
      const double e = rel_err(jet_vals[n][i], fd_vals[n][i], 1e-3 * scale[i]);
      (i < 2 ? first : second) = std::max(i < 2 ? first : second, e);
    }
  }
  return {first, second};
}

}  // namespace

VerificationReport verify(std::uint64_t seed) {
  VerificationReport r;
  r.manufactured_residual_max = manufactured_check();
  r.gradient_max_relative_error = gradient_check(seed);
  const auto [first, second] = jet_check(seed);
  r.jet_first_max_relative_error = first;
  r.jet_second_max_relative_error = second;
  return r;
}

}  // namespace bpinn
