#include "bpinn/cli.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bpinn/checkpoint.hpp"
#include "bpinn/config.hpp"
#include "bpinn/errors.hpp"
#include "bpinn/io.hpp"
#include "bpinn/studies.hpp"
#include "bpinn/svg_plot.hpp"

namespace bpinn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Options shared by every subcommand.
struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<bool> augmented;
  bool plots = false;
  bool paper_scale = false;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment configuration");
  cmd->add_option("--set", o.overrides, "override a config value, e.g. --set train.max_epochs=2000")
      ->allow_extra_args(false);
  cmd->add_option("--seed", o.seed, "training seed (train.seed)");
  cmd->add_option("--augmented", o.augmented, "enable the pressure-Poisson augmentation (true|false)");
  cmd->add_flag("--plots", o.plots, "also write SVG plots");
  cmd->add_flag("--paper-scale", o.paper_scale, "allow the long-running paper preset");
  cmd->add_option("--out", o.out_dir, "output directory (output_dir)");
}

struct Resolved {
  ExperimentConfig config;
  json doc;
  fs::path out;
};

Resolved resolve(const CommonOptions& o, std::ostream& err, std::optional<json> base = std::nullopt,
                 bool lbfgs_default = false) {
  std::vector<std::string> overrides = o.overrides;
  if (o.seed) overrides.push_back("train.seed=" + std::to_string(*o.seed));
  if (o.augmented) overrides.push_back(std::string("train.augmented=") + (*o.augmented ? "true" : "false"));
  if (!o.out_dir.empty()) overrides.push_back("output_dir=" + json(o.out_dir).dump());

  std::optional<fs::path> file;
  if (!o.config_path.empty()) file = fs::path(o.config_path);
  json doc;
  if (base && !file) {
    doc = *base;
    for (const auto& s : overrides) apply_override(doc, s);
  } else {
    if (lbfgs_default) {
      json user = file ? json::parse(read_text_file(*file), nullptr, false) : json::object();
      const bool sets_optimizer = user.is_object() && user.contains("train") && user["train"].is_object() &&
                                  user["train"].contains("optimizer");
      if (!sets_optimizer) overrides.insert(overrides.begin(), "train.optimizer=lbfgs");
    }
    doc = resolve_config_json(file, overrides, "desk");
  }
  Resolved r{config_from_json(doc), json(), {}};
  r.doc = to_json(r.config);
  r.out = r.config.output_dir;
  if (is_paper_scale(r.config)) {
    if (!o.paper_scale) {
      throw ConfigError("the paper preset runs for many CPU-hours; pass --paper-scale to confirm");
    }
    err << "warning: paper-scale preset (" << r.config.architecture << ", threshold "
        << format_double(r.config.train.threshold) << ", up to " << r.config.train.max_epochs
        << " epochs) is expected to take many CPU-hours\n";
  }
  return r;
}

Provenance provenance(const std::string& kind, const Resolved& r) { return {kind, r.doc, r.config.train.seed}; }

void write_json(const fs::path& path, const json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

void write_residual_plot(const fs::path& path, const TrainingHistory& h, const std::string& title) {
  PlotSeries domain{"domain", {}};
  PlotSeries boundary{"boundary", {}};
  PlotSeries augm{"augmentation", {}};
  PlotSeries total{"total", {}};
  for (const auto& rec : h.records) {
    const double e = rec.epoch;
    domain.points.emplace_back(e, rec.breakdown.r_domain);
    boundary.points.emplace_back(e, rec.breakdown.r_boundary);
    if (h.augmented) augm.points.emplace_back(e, rec.breakdown.r_augm);
    total.points.emplace_back(e, rec.breakdown.r_total);
  }
  std::vector<PlotSeries> series{total, domain, boundary};
  if (h.augmented) series.push_back(augm);
  write_text_file(path, line_plot_svg({title, "epoch", "residual", false, true}, series));
}

int exit_for(const TrainingHistory& h) { return h.status == TrainStatus::Diverged ? kExitNumerical : kExitOk; }

void report_run(std::ostream& out, const std::string& label, const TrainingHistory& h, const Assessment& a) {
  out << label << ": " << train_status_name(h.status) << " after " << h.epochs_used << " epochs";
  if (!h.records.empty()) out << ", r_total " << format_double(h.records.back().breakdown.r_total);
  out << ", e_G " << format_double(a.generalization_error) << "\n";
  for (Field f : kFields) {
    const FieldErrors& e = a.report[f];
    out << "  " << field_name(f) << ": w0 " << format_double(e.w0_inf) << "  w1 " << format_double(e.w1_inf)
        << "  w2 " << format_double(e.w2_inf) << "  l2 " << format_double(e.l2) << "\n";
  }
}

json report_json(const Assessment& a, const Provenance& p, const TrainingHistory* h) {
  json doc = error_report_json(a.report);
  add_provenance(doc, p);
  doc["generalization_error"] = a.generalization_error;
  if (h) {
    doc["status"] = std::string(train_status_name(h->status));
    doc["epochs_used"] = h->epochs_used;
  }
  return doc;
}

int cmd_train(const CommonOptions& o, std::ostream& out, std::ostream& err) {
  const Resolved r = resolve(o, err);
  const RunOutcome run = run_training(r.config);
  const Provenance p = provenance("train", r);
  save_checkpoint(r.out / "checkpoint.json", make_checkpoint(run, r.config));
  write_text_file(r.out / "metrics.csv", metrics_csv(run.result.history, p));
  write_json(r.out / "error_report.json", report_json(run.assessment, p, &run.result.history));
  if (o.plots) write_residual_plot(r.out / "residuals.svg", run.result.history, "training residuals");
  report_run(out, r.config.architecture + " on " + std::to_string(run.dataset.size()) + " points",
             run.result.history, run.assessment);
  out << "wrote " << (r.out / "checkpoint.json").string() << "\n";
  return exit_for(run.result.history);
}

int cmd_evaluate(const CommonOptions& o, const std::string& checkpoint_path, std::ostream& out, std::ostream& err) {
  const Checkpoint ck = load_checkpoint(checkpoint_path);
  const Resolved r = resolve(o, err, std::optional<json>(ck.config));
  const MLPArchitecture arch = ck.architecture;
  const Assessment a = assess(arch, ck.params, r.config);
  const Provenance p = provenance("evaluate", r);
  write_json(r.out / "error_report.json", report_json(a, p, nullptr));
  const auto grid = test_grid(r.config.domain, r.config.grid_n);
  write_text_file(r.out / "error_field.csv", grid_field_csv(grid, error_field(arch, ck.params, grid), p));
  out << "e_G " << format_double(a.generalization_error) << "\n";
  for (Field f : kFields) {
    const FieldErrors& e = a.report[f];
    out << "  " << field_name(f) << ": w0 " << format_double(e.w0_inf) << "  w1 " << format_double(e.w1_inf)
        << "  w2 " << format_double(e.w2_inf) << "  l2 " << format_double(e.l2) << "\n";
  }
  return kExitOk;
}

void write_study_plots(const fs::path& dir, std::span<const StudyCell> cells) {
  std::vector<int> levels;
  std::vector<double> thresholds;
  for (const auto& c : cells) {
    if (std::find(levels.begin(), levels.end(), c.level) == levels.end()) levels.push_back(c.level);
    if (std::find(thresholds.begin(), thresholds.end(), c.threshold) == thresholds.end()) {
      thresholds.push_back(c.threshold);
    }
  }
  for (std::string_view norm : kNormNames) {
    for (Field f : kFields) {
      std::vector<PlotSeries> by_level;
      for (int level : levels) {
        PlotSeries s{"level " + std::to_string(level), {}};
        for (const auto& c : cells) {
          if (c.level == level && c.converged()) s.points.emplace_back(c.r_total, norm_value(c.report[f], norm));
        }
        by_level.push_back(std::move(s));
      }
      const std::string name = std::string(field_name(f)) + "_" + std::string(norm);
      write_text_file(dir / ("plot_" + name + "_vs_training_error.svg"),
                      line_plot_svg({name + " error vs training error", "training error", name}, by_level));
      std::vector<PlotSeries> by_threshold;
      for (double t : thresholds) {
        PlotSeries s{"threshold " + format_double(t), {}};
        for (const auto& c : cells) {
          if (c.threshold == t && c.converged()) {
            s.points.emplace_back(static_cast<double>(c.points()), norm_value(c.report[f], norm));
          }
        }
        by_threshold.push_back(std::move(s));
      }
      write_text_file(dir / ("plot_" + name + "_vs_points.svg"),
                      line_plot_svg({name + " error vs collocation points", "collocation points", name},
                                    by_threshold));
    }
  }
}

int cmd_convergence(const CommonOptions& o, std::ostream& out, std::ostream& err) {
  const Resolved r = resolve(o, err);
  const auto cells = convergence_study(r.config, [&](const std::string& line) { out << line << "\n"; });
  const auto fits = fit_study(cells);
  const Provenance p = provenance("convergence-study", r);
  write_text_file(r.out / "study_table.csv", study_table_csv(cells, p));
  write_json(r.out / "study_fits.json", study_fits_json(fits, p));
  if (o.plots) write_study_plots(r.out, cells);
  for (const auto& f : fits) {
    if (f.norm != "l2" || f.abscissa != AbscissaKind::TrainingError) continue;
    out << "level " << static_cast<int>(f.fixed) << " " << field_name(f.field)
        << " l2 vs training error: slope " << format_double(f.fit.slope) << " (r^2 "
        << format_double(f.fit.r_squared) << ")\n";
  }
  out << "wrote " << (r.out / "study_table.csv").string() << "\n";
  return kExitOk;
}

int cmd_architecture(const CommonOptions& o, std::ostream& out, std::ostream& err) {
  const Resolved r = resolve(o, err);
  const auto cells = architecture_study(r.config, [&](const std::string& line) { out << line << "\n"; });
  write_text_file(r.out / "architecture_heatmap.csv",
                  architecture_heatmap_csv(cells, provenance("architecture-study", r)));
  out << "wrote " << (r.out / "architecture_heatmap.csv").string() << "\n";
  return kExitOk;
}

int cmd_transfer(const CommonOptions& o, const std::string& checkpoint_path, bool cold, std::ostream& out,
                 std::ostream& err) {
  const Checkpoint ck = load_checkpoint(checkpoint_path);
  const Resolved r = resolve(o, err, std::nullopt, true);
  const TransferOutcome t = run_transfer(ck, r.config, cold);
  const Provenance p = provenance("transfer", r);
  json summary = transfer_summary_json(t, p);
  summary["source_checkpoint"] = {{"path", checkpoint_path}, {"config", ck.config}, {"seed", ck.seed}};
  write_json(r.out / "transfer_summary.json", summary);
  write_text_file(r.out / "metrics_warm.csv", metrics_csv(t.warm.history, p));
  Checkpoint warm_ck{t.arch, r.config.train.seed, t.warm.params, t.warm.adam_state, r.doc, t.warm.history.status,
                     t.warm.history.epochs_used};
  save_checkpoint(r.out / "checkpoint.json", warm_ck);
  report_run(out, "warm start", t.warm.history, t.warm_assessment);
  if (t.cold) {
    write_text_file(r.out / "metrics_cold.csv", metrics_csv(t.cold->history, p));
    report_run(out, "cold start", t.cold->history, *t.cold_assessment);
  }
  if (o.plots) {
    write_residual_plot(r.out / "residuals_warm.svg", t.warm.history, "warm start residuals");
    if (t.cold) write_residual_plot(r.out / "residuals_cold.svg", t.cold->history, "cold start residuals");
  }
  return exit_for(t.warm.history);
}

int cmd_sample(const CommonOptions& o, std::optional<int> level, std::ostream& out, std::ostream& err) {
  const Resolved r = resolve(o, err);
  const int lvl = level.value_or(r.config.dataset.level);
  if (lvl < 0 || lvl > 12) throw ConfigError("--level must be in [0, 12]");
  const CollocationSet set = experiment_dataset(r.config, lvl);
  Provenance p{"sample", r.doc, r.config.dataset.seed};
  const fs::path path = r.out / ("collocation_level" + std::to_string(lvl) + ".csv");
  write_text_file(path, collocation_csv(set, p));
  out << set.domain_points.size() << " domain + " << set.boundary_points.size() << " boundary points -> "
      << path.string() << "\n";
  return kExitOk;
}

int cmd_verify(const CommonOptions& o, std::ostream& out, std::ostream& err) {
  const Resolved r = resolve(o, err);
  const VerificationReport v = verify(r.config.train.seed);
  out << "manufactured residual max  " << format_double(v.manufactured_residual_max) << " (< 1e-20)\n";
  out << "loss gradient vs FD        " << format_double(v.gradient_max_relative_error) << " (< 1e-5)\n";
  out << "jet first derivatives      " << format_double(v.jet_first_max_relative_error) << " (< 1e-5)\n";
  out << "jet second derivatives     " << format_double(v.jet_second_max_relative_error) << " (< 1e-4)\n";
  out << (v.passed() ? "verify: PASS\n" : "verify: FAIL\n");
  return v.passed() ? kExitOk : kExitNumerical;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Physics-informed networks for Boussinesq flow against the Beltrami manufactured solution", "bpinn"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "bpinn 0.3.0");

  CommonOptions o;
  std::string checkpoint_path;
  bool cold = false;
  std::optional<int> level;

  auto* train = app.add_subcommand("train", "train one network and write checkpoint, metrics and error report");
  add_common(train, o);
  auto* evaluate = app.add_subcommand("evaluate", "error norms and error field of a checkpoint");
  add_common(evaluate, o);
  evaluate->add_option("--checkpoint", checkpoint_path, "checkpoint JSON")->required();
  auto* convergence = app.add_subcommand("convergence-study", "threshold ladder x dataset ladder sweep");
  add_common(convergence, o);
  auto* architecture = app.add_subcommand("architecture-study", "epochs-to-threshold per architecture and dataset");
  add_common(architecture, o);
  auto* transfer = app.add_subcommand("transfer", "warm start from a checkpoint on a new domain or flow");
  add_common(transfer, o);
  transfer->add_option("--checkpoint", checkpoint_path, "source checkpoint JSON")->required();
  transfer->add_flag("--cold-baseline", cold, "also train from scratch for comparison");
  auto* sample = app.add_subcommand("sample", "write a nested Latin hypercube collocation set as CSV");
  add_common(sample, o);
  sample->add_option("--level", level, "ladder level (default dataset.level)");
  auto* verify_cmd = app.add_subcommand("verify", "manufactured-solution, gradient and jet checks");
  add_common(verify_cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return cmd_train(o, out, err);
    if (*evaluate) return cmd_evaluate(o, checkpoint_path, out, err);
    if (*convergence) return cmd_convergence(o, out, err);
    if (*architecture) return cmd_architecture(o, out, err);
    if (*transfer) return cmd_transfer(o, checkpoint_path, cold, out, err);
    if (*sample) return cmd_sample(o, level, out, err);
    if (*verify_cmd) return cmd_verify(o, out, err);
  } catch (const NumericalOverflowError& e) {
    err << "bpinn: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "bpinn: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "bpinn: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace bpinn::cli
