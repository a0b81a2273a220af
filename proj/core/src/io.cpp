#include "bpinn/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "bpinn/errors.hpp"
#include "bpinn/rng.hpp"

namespace bpinn {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_header_lines(const Provenance& p) {
  std::string out = "# bpinn " + p.kind + "\n";
  out += "# config: " + p.config.dump() + "\n";
  out += "# seed: " + std::to_string(p.seed) + "\n";
  out += "# rng: " + std::string(kRngAlgorithm) + "\n";
  return out;
}

void add_provenance(json& doc, const Provenance& p) {
  doc["kind"] = p.kind;
  doc["config"] = p.config;
  doc["seed"] = p.seed;
  doc["rng"] = std::string(kRngAlgorithm);
}

std::string metrics_csv(const TrainingHistory& history, const Provenance& p) {
  std::string out = csv_header_lines(p);
  for (std::size_t i = 0; i < kMetricsColumns.size(); ++i) {
    if (i) out += ',';
    out += kMetricsColumns[i];
  }
  out += '\n';
  for (const auto& rec : history.records) {
    const ResidualBreakdown& b = rec.breakdown;
    const auto augm = [&](double x) { return b.augmented ? format_double(x) : std::string(); };
    out += std::to_string(rec.epoch);
    for (const std::string& cell :
         {format_double(b.r_u), format_double(b.r_v), format_double(b.r_div), format_double(b.r_theta),
          format_double(b.r_boundary), augm(b.r_p), augm(b.r_div_x), augm(b.r_div_y), format_double(b.r_domain),
          augm(b.r_augm), format_double(b.r_total),
          rec.validation_total ? format_double(*rec.validation_total) : std::string()}) {
      out += ',';
      out += cell;
    }
    out += '\n';
  }
  return out;
}

std::string collocation_csv(const CollocationSet& set, const Provenance& p) {
  std::string out = csv_header_lines(p);
  out += "x,y,kind,g_u,g_v,g_theta,g_p\n";
  for (const auto& q : set.domain_points) {
    out += format_double(q.x) + ',' + format_double(q.y) + ",domain,,,,\n";
  }
  for (const auto& b : set.boundary_points) {
    out += format_double(b.point.x) + ',' + format_double(b.point.y) + ',' + std::string(edge_tag(b.edge)) + ',' +
           format_double(b.target.u) + ',' + format_double(b.target.v) + ',' + format_double(b.target.theta) + ',' +
           (std::isnan(b.target.p) ? std::string() : format_double(b.target.p)) + '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
  if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double x = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size()) {
    throw IoError("collocation CSV line " + std::to_string(line_no) + ": '" + cell + "' is not a number");
  }
  return x;
}

}  // namespace

CollocationSet parse_collocation_csv(std::string_view text) {
  CollocationSet set;
  std::vector<std::string> header;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto cells = split_csv_line(line);
    if (header.empty()) {
      header = std::move(cells);
      if (header.size() < 6 || header[0] != "x" || header[1] != "y" || header[2] != "kind" || header[3] != "g_u" ||
          header[4] != "g_v" || header[5] != "g_theta") {
        throw IoError("collocation CSV must start with columns x,y,kind,g_u,g_v,g_theta");
      }
      continue;
    }
    if (cells.size() != header.size()) {
      throw IoError("collocation CSV line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                    " cells, expected " + std::to_string(header.size()));
    }
    const Point2 q{parse_cell(cells[0], line_no), parse_cell(cells[1], line_no)};
    if (cells[2] == "domain") {
      set.domain_points.push_back(q);
      continue;
    }
    BoundaryPoint b;
    b.point = q;
    try {
      b.edge = parse_edge_tag(cells[2]);
    } catch (const Error&) {
      throw IoError("collocation CSV line " + std::to_string(line_no) + ": unknown kind '" + cells[2] + "'");
    }
    b.target.u = parse_cell(cells[3], line_no);
    b.target.v = parse_cell(cells[4], line_no);
    b.target.theta = parse_cell(cells[5], line_no);
    b.target.p = header.size() > 6 ? parse_cell(cells[6], line_no) : std::numeric_limits<double>::quiet_NaN();
    set.boundary_points.push_back(b);
  }
  if (header.empty()) throw IoError("collocation CSV has no header");
  return set;
}

std::string grid_field_csv(std::span<const Point2> grid, const std::array<std::vector<double>, 4>& fields,
                           const Provenance& p) {
  for (const auto& f : fields) {
    if (f.size() != grid.size()) throw ArgumentError("grid_field_csv: field length does not match the grid");
  }
  std::string out = csv_header_lines(p);
  out += "x,y,u,v,p,theta\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out += format_double(grid[i].x) + ',' + format_double(grid[i].y);
    for (const auto& f : fields) out += ',' + format_double(f[i]);
    out += '\n';
  }
  return out;
}

json error_report_json(const ErrorReport& r) {
  json fields = json::object();
  for (Field f : kFields) {
    const FieldErrors& e = r[f];
    fields[std::string(field_name(f))] = {{"w0_inf", e.w0_inf}, {"w1_inf", e.w1_inf}, {"w2_inf", e.w2_inf},
                                          {"l2", e.l2}};
  }
  return json{{"fields", fields},
              {"grid", {{"n_per_side", r.n_per_side},
                        {"points", r.grid_points},
                        {"x_min", r.domain.x_min},
                        {"x_max", r.domain.x_max},
                        {"y_min", r.domain.y_min},
                        {"y_max", r.domain.y_max}}}};
}

}  // namespace bpinn
