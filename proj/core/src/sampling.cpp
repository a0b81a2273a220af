#include "bpinn/sampling.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "bpinn/errors.hpp"
#include "bpinn/rng.hpp"

namespace bpinn {

namespace {

// Stream ids for derive_seed.
constexpr std::uint64_t kDomainStream = 0x100;
constexpr std::uint64_t kEdgeStream = 0x200;
constexpr std::uint64_t kSplitStream = 0x300;

std::vector<double> stratified_unit_samples(std::size_t n, Rng& rng) {
  std::vector<std::size_t> strata(n);
  std::iota(strata.begin(), strata.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(strata));
  std::vector<double> out(n);
  const auto dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = (static_cast<double>(strata[i]) + rng.uniform()) / dn;
  }
  return out;
}

Point2 edge_point(const DomainSpec& rect, Edge edge, double t) {
  switch (edge) {
    case Edge::South: return {rect.x_min + t * rect.width(), rect.y_min};
    case Edge::North: return {rect.x_min + t * rect.width(), rect.y_max};
    case Edge::West: return {rect.x_min, rect.y_min + t * rect.height()};
    case Edge::East: return {rect.x_max, rect.y_min + t * rect.height()};
  }
  return {};
}

}  // namespace

std::string_view edge_tag(Edge e) {
  switch (e) {
    case Edge::South: return "edge-S";
    case Edge::North: return "edge-N";
    case Edge::West: return "edge-W";
    case Edge::East: return "edge-E";
  }
  return "edge-S";
}

Edge parse_edge_tag(std::string_view tag) {
  for (Edge e : kEdges) {
    if (edge_tag(e) == tag) return e;
  }
  throw ArgumentError("unknown edge tag '" + std::string(tag) + "'");
}

std::vector<Point2> latin_hypercube(std::size_t n, const DomainSpec& rect, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("latin_hypercube: n must be at least 1");
  rect.validate();
  Rng rng(seed);
  const auto xs = stratified_unit_samples(n, rng);
  const auto ys = stratified_unit_samples(n, rng);
  std::vector<Point2> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = {rect.x_min + xs[i] * rect.width(), rect.y_min + ys[i] * rect.height()};
  }
  return pts;
}

std::vector<Point2> edge_latin_hypercube(std::size_t n, const DomainSpec& rect, Edge edge, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("edge_latin_hypercube: n must be at least 1");
  rect.validate();
  Rng rng(seed);
  const auto ts = stratified_unit_samples(n, rng);
  std::vector<Point2> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = edge_point(rect, edge, ts[i]);
  return pts;
}

std::size_t ladder_domain_points(int level) { return std::size_t{8} << level; }
std::size_t ladder_points_per_edge(int level) { return std::size_t{1} << level; }

std::vector<CollocationSet> hierarchical_datasets(int levels, const DomainSpec& rect, std::uint64_t seed,
                                                  const SolutionProvider& exact) {
  if (levels < 1 || levels > 20) throw ArgumentError("hierarchical_datasets: levels must be in [1, 20]");
  rect.validate();

  std::vector<CollocationSet> out;
  CollocationSet current;
  current.seed = seed;
  for (int k = 0; k < levels; ++k) {
    const std::size_t want_domain = ladder_domain_points(k);
    const std::size_t want_edge = ladder_points_per_edge(k);
    const std::size_t add_domain = want_domain - current.domain_points.size();
    const std::size_t add_edge = want_edge - (k == 0 ? 0 : ladder_points_per_edge(k - 1));

    const auto lvl = static_cast<std::uint64_t>(k);
    const auto fresh = latin_hypercube(add_domain, rect, derive_seed(seed, kDomainStream + lvl));
    current.domain_points.insert(current.domain_points.end(), fresh.begin(), fresh.end());
    for (Edge e : kEdges) {
      const auto stream = kEdgeStream + 16 * lvl + static_cast<std::uint64_t>(e);
      for (const Point2& p : edge_latin_hypercube(add_edge, rect, e, derive_seed(seed, stream))) {
        current.boundary_points.push_back({p, e, exact(p)});
      }
    }
    current.level = k;
    out.push_back(current);
  }
  return out;
}

std::pair<CollocationSet, CollocationSet> split_validation(const CollocationSet& set, double fraction,
                                                           std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw ArgumentError("split_validation: fraction must be in [0, 1)");
  const std::size_t total = set.size();
  const auto n_val = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(total) + 0.5));

  // Partial Fisher-Yates over the combined index space (domain first).
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(derive_seed(seed, kSplitStream));
  std::vector<char> chosen(total, 0);
  for (std::size_t i = 0; i < n_val; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(total - i));
    std::swap(idx[i], idx[j]);
    chosen[idx[i]] = 1;
  }

  CollocationSet train, val;
  train.level = val.level = set.level;
  train.seed = val.seed = set.seed;
  const std::size_t nd = set.domain_points.size();
  for (std::size_t i = 0; i < nd; ++i) {
    (chosen[i] ? val : train).domain_points.push_back(set.domain_points[i]);
  }
  for (std::size_t i = 0; i < set.boundary_points.size(); ++i) {
    (chosen[nd + i] ? val : train).boundary_points.push_back(set.boundary_points[i]);
  }
  return {std::move(train), std::move(val)};
}

namespace {
double grid_coord(double lo, double hi, int i, int n) {
  if (i == n - 1) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}
}  // namespace

std::vector<Point2> test_grid(const DomainSpec& rect, int n_per_side) {
  if (n_per_side < 2) throw ArgumentError("test_grid: need at least 2 points per side");
  rect.validate();
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(n_per_side) * n_per_side);
  for (int j = 0; j < n_per_side; ++j) {
    const double y = grid_coord(rect.y_min, rect.y_max, j, n_per_side);
    for (int i = 0; i < n_per_side; ++i) pts.push_back({grid_coord(rect.x_min, rect.x_max, i, n_per_side), y});
  }
  return pts;
}

std::vector<BoundaryPoint> boundary_grid(const DomainSpec& rect, int n_per_side, const SolutionProvider& exact) {
  if (n_per_side < 2) throw ArgumentError("boundary_grid: need at least 2 points per side");
  rect.validate();
  std::vector<BoundaryPoint> out;
  const int n = n_per_side;
  for (int i = 0; i < n; ++i) {
    const Point2 p{grid_coord(rect.x_min, rect.x_max, i, n), rect.y_min};
    out.push_back({p, Edge::South, exact(p)});
  }
  for (int i = 0; i < n; ++i) {
    const Point2 p{grid_coord(rect.x_min, rect.x_max, i, n), rect.y_max};
    out.push_back({p, Edge::North, exact(p)});
  }
  for (int j = 1; j + 1 < n; ++j) {
    const Point2 p{rect.x_min, grid_coord(rect.y_min, rect.y_max, j, n)};
    out.push_back({p, Edge::West, exact(p)});
  }
  for (int j = 1; j + 1 < n; ++j) {
    const Point2 p{rect.x_max, grid_coord(rect.y_min, rect.y_max, j, n)};
    out.push_back({p, Edge::East, exact(p)});
  }
  return out;
}

}  // namespace bpinn
