#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "bpinn/physics.hpp"
#include "bpinn/types.hpp"

namespace bpinn {

enum class Edge { South, North, West, East };

inline constexpr std::array<Edge, 4> kEdges = {Edge::South, Edge::North, Edge::West, Edge::East};

/// CSV tag of an edge: "edge-S", "edge-N", "edge-W", "edge-E".
std::string_view edge_tag(Edge e);
Edge parse_edge_tag(std::string_view tag);

struct BoundaryPoint {
  Point2 point;
  Edge edge = Edge::South;
  /// Full exact state on the boundary. Only u, v and theta form the
  /// Dirichlet data; p is carried for the optional pressure term and is NaN
  /// when unknown.
  FieldState target;

  DirichletTarget dirichlet() const { return {target.u, target.v, target.theta}; }
};

/// Training (or validation) points with attached boundary data.
struct CollocationSet {
  std::vector<Point2> domain_points;
  std::vector<BoundaryPoint> boundary_points;
  int level = 0;
  std::uint64_t seed = 0;

  std::size_t size() const { return domain_points.size() + boundary_points.size(); }
};

/// Latin hypercube design of n points on the rectangle: one point per stratum
/// in each dimension, uniform jitter inside the stratum, strata paired by
/// independent random permutations. Throws ArgumentError for n == 0.
std::vector<Point2> latin_hypercube(std::size_t n, const DomainSpec& rect, std::uint64_t seed);

/// One-dimensional Latin hypercube sample of n points on an edge of the rectangle.
std::vector<Point2> edge_latin_hypercube(std::size_t n, const DomainSpec& rect, Edge edge, std::uint64_t seed);

/// Domain points at ladder level k: 8 * 2^k. Boundary points: 4 * 2^k (2^k per edge).
std::size_t ladder_domain_points(int level);
std::size_t ladder_points_per_edge(int level);

/// Nested datasets for levels 0..levels-1 (12, 24, ..., 1536 points for the
/// canonical eight levels). Level k+1 keeps every point of level k verbatim,
/// in the same order, and appends an independent Latin hypercube increment.
std::vector<CollocationSet> hierarchical_datasets(int levels, const DomainSpec& rect, std::uint64_t seed,
                                                  const SolutionProvider& exact = beltrami_solution_provider());

/// Exact partition of `set` into (training, validation). The validation size
/// is round-half-up(fraction * total), drawn uniformly without replacement
/// over domain and boundary points together; both parts keep input order.
std::pair<CollocationSet, CollocationSet> split_validation(const CollocationSet& set, double fraction,
                                                           std::uint64_t seed);

/// Uniform n x n grid covering the rectangle including its edges, row-major
/// with x varying fastest: first point (x_min, y_min), last (x_max, y_max).
std::vector<Point2> test_grid(const DomainSpec& rect, int n_per_side);

/// Perimeter points of test_grid(rect, n) with exact boundary data attached.
/// Corners are listed once, on the South/North edges.
std::vector<BoundaryPoint> boundary_grid(const DomainSpec& rect, int n_per_side,
                                         const SolutionProvider& exact = beltrami_solution_provider());

}  // namespace bpinn
