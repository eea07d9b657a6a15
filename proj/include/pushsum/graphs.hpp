#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace pushsum {

using Edge = std::pair<std::size_t, std::size_t>;

/// Simple undirected graph on nodes 0..p-1 with sorted adjacency lists.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  explicit UndirectedGraph(std::size_t node_count);
  /// Throws InvalidInput on self-loops, duplicates or out-of-range endpoints.
  UndirectedGraph(std::size_t node_count, const std::vector<Edge>& edges);

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return adjacency_.at(i); }
  std::size_t degree(std::size_t i) const { return adjacency_.at(i).size(); }
  bool has_edge(std::size_t i, std::size_t j) const;

  /// Returns false if the edge already exists.
  bool add_edge(std::size_t i, std::size_t j);

  /// Edges as (i, j) with i < j, lexicographically sorted.
  std::vector<Edge> edges() const;
  bool connected() const;
  std::size_t min_degree() const;

  friend bool operator==(const UndirectedGraph&, const UndirectedGraph&) = default;

 private:
  std::vector<std::vector<std::size_t>> adjacency_;
  std::size_t edge_count_ = 0;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

using NodePositions = std::vector<Point>;

/// Node i gets z = c * z_random + (1 - c) * z_grid where z_grid is the i-th
/// site (row-major) of the sqrt(p0) x sqrt(p0) lattice with spacing
/// 1/(sqrt(p0) - 1) and z_random is uniform on the unit square.
NodePositions interpolated_positions(std::size_t p0, double c, std::uint64_t seed);

/// Graph joining every pair at Euclidean distance <= radius.
UndirectedGraph geometric_graph(const NodePositions& pos, double radius);

/// Smallest pairwise distance r whose geometric graph has a connected
/// component with at least ceil(target_fraction * p0) nodes.
double threshold_for_giant(const NodePositions& pos, double target_fraction = 0.9);

struct Component {
  UndirectedGraph graph;                 // relabelled 0..p-1
  std::vector<std::size_t> original;     // original[new] = old index, increasing
};

/// Largest connected component; ties go to the component holding the smallest index.
Component giant_component(const UndirectedGraph& g);

struct RggInstance {
  NodePositions positions;
  double radius = 0.0;
  Component giant;
};

/// interpolated_positions -> threshold_for_giant -> giant_component.
RggInstance make_rgg_instance(std::size_t p0, double c, std::uint64_t seed, double target_fraction = 0.9);

/// A p-cycle plus extra edges appended one by one, each drawn uniformly from
/// the pairs not yet present.
struct CycleGrowth {
  std::size_t p = 0;
  std::vector<Edge> added;

  /// Cycle plus the first `k` added edges.
  UndirectedGraph graph_at(std::size_t k) const;
};

CycleGrowth grow_cycle(std::size_t p, std::size_t extra_edges, std::uint64_t seed);

/// graph_at(0), ..., graph_at(extra_edges).
std::vector<UndirectedGraph> cycle_with_edges(std::size_t p, std::size_t extra_edges, std::uint64_t seed);

/// Edge-list text format: "p m" on the first line, then m lines "i j", 0-based.
void write_edge_list(std::ostream& out, const UndirectedGraph& g);
UndirectedGraph read_edge_list(std::istream& in);
UndirectedGraph read_edge_list_file(const std::string& path);
void write_edge_list_file(const std::string& path, const UndirectedGraph& g);

}  // namespace pushsum
