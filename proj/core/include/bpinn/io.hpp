#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpinn/evaluation.hpp"
#include "bpinn/sampling.hpp"
#include "bpinn/training.hpp"

namespace bpinn {

std::string read_text_file(const std::filesystem::path& path);
/// Creates missing parent directories. Throws IoError naming the path.
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Shortest-safe decimal: %.17g, which round-trips every double.
std::string format_double(double x);

/// Who produced a file and from what. Rendered as "# " comment lines at the
/// top of CSV files and as top-level keys of JSON outputs.
struct Provenance {
  std::string kind;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
};

std::string csv_header_lines(const Provenance& p);
void add_provenance(nlohmann::json& doc, const Provenance& p);

inline constexpr std::array<std::string_view, 13> kMetricsColumns = {
    "epoch",   "r_u",      "r_v",      "r_div",  "r_theta", "r_boundary_total", "r_p",
    "r_div_x", "r_div_y",  "r_domain", "r_augm", "r_total", "validation_total"};

/// One row per epoch. Augmentation cells are empty for non-augmented runs and
/// validation_total is empty when no validation split exists.
std::string metrics_csv(const TrainingHistory& history, const Provenance& p);

/// Columns x, y, kind, g_u, g_v, g_theta, g_p. kind is "domain" or an edge tag
/// ("edge-S", ...); the g_ columns are empty for domain rows.
std::string collocation_csv(const CollocationSet& set, const Provenance& p);
/// Inverse of collocation_csv. A missing g_p column or empty g_p cell gives NaN.
CollocationSet parse_collocation_csv(std::string_view text);

/// Columns x, y, u, v, p, theta; one row per grid point in grid order.
std::string grid_field_csv(std::span<const Point2> grid, const std::array<std::vector<double>, 4>& fields,
                           const Provenance& p);

nlohmann::json error_report_json(const ErrorReport& r);

}  // namespace bpinn
