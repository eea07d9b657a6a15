#include "pushsum/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "pushsum/error.hpp"
#include "pushsum/random.hpp"

namespace pushsum {

UndirectedGraph::UndirectedGraph(std::size_t node_count) : adjacency_(node_count) {}

UndirectedGraph::UndirectedGraph(std::size_t node_count, const std::vector<Edge>& edges)
    : adjacency_(node_count) {
  for (const auto& [i, j] : edges) {
    if (!add_edge(i, j)) {
      throw InvalidInput("duplicate edge " + std::to_string(i) + " " + std::to_string(j));
    }
  }
}

bool UndirectedGraph::has_edge(std::size_t i, std::size_t j) const {
  if (i >= node_count() || j >= node_count()) return false;
  const auto& a = adjacency_[i];
  return std::binary_search(a.begin(), a.end(), j);
}

bool UndirectedGraph::add_edge(std::size_t i, std::size_t j) {
  if (i >= node_count() || j >= node_count()) {
    throw InvalidInput("edge endpoint out of range");
  }
  if (i == j) throw InvalidInput("self-loop at node " + std::to_string(i));
  if (has_edge(i, j)) return false;
  auto& a = adjacency_[i];
  a.insert(std::lower_bound(a.begin(), a.end(), j), j);
  auto& b = adjacency_[j];
  b.insert(std::lower_bound(b.begin(), b.end(), i), i);
  ++edge_count_;
  return true;
}

std::vector<Edge> UndirectedGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (std::size_t i = 0; i < node_count(); ++i) {
    for (std::size_t j : adjacency_[i]) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

bool UndirectedGraph::connected() const {
  if (node_count() <= 1) return true;
  std::vector<char> seen(node_count(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t w : adjacency_[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == node_count();
}

std::size_t UndirectedGraph::min_degree() const {
  std::size_t d = node_count() == 0 ? 0 : adjacency_[0].size();
  for (const auto& a : adjacency_) d = std::min(d, a.size());
  return d;
}

namespace {

std::size_t exact_sqrt(std::size_t n) {
  auto s = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  while (s * s > n) --s;
  while ((s + 1) * (s + 1) <= n) ++s;
  return s;
}

double distance(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  /// Returns the size of the merged set.
  std::size_t unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return size_[a];
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return size_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace

NodePositions interpolated_positions(std::size_t p0, double c, std::uint64_t seed) {
  if (p0 == 0) throw InvalidInput("p0 must be positive");
  const std::size_t side = exact_sqrt(p0);
  if (side * side != p0) throw InvalidInput("p0 must be a perfect square, got " + std::to_string(p0));
  if (!(c >= 0.0 && c <= 1.0)) throw InvalidInput("interpolation coefficient c must lie in [0, 1]");

  Rng rng(seed);
  const double spacing = side > 1 ? 1.0 / static_cast<double>(side - 1) : 0.0;
  NodePositions pos(p0);
  for (std::size_t i = 0; i < p0; ++i) {
    const double gx = static_cast<double>(i % side) * spacing;
    const double gy = static_cast<double>(i / side) * spacing;
    const double rx = uniform01(rng);
    const double ry = uniform01(rng);
    pos[i] = {c * rx + (1.0 - c) * gx, c * ry + (1.0 - c) * gy};
  }
  return pos;
}

UndirectedGraph geometric_graph(const NodePositions& pos, double radius) {
  UndirectedGraph g(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) {
    for (std::size_t j = i + 1; j < pos.size(); ++j) {
      if (distance(pos[i], pos[j]) <= radius) g.add_edge(i, j);
    }
  }
  return g;
}

double threshold_for_giant(const NodePositions& pos, double target_fraction) {
  if (!(target_fraction > 0.0 && target_fraction <= 1.0)) {
    throw InvalidInput("target_fraction must lie in (0, 1]");
  }
  const std::size_t n = pos.size();
  if (n == 0) throw InvalidInput("no positions");
  const auto target = static_cast<std::size_t>(std::ceil(target_fraction * static_cast<double>(n) - 1e-12));
  if (target <= 1) return 0.0;

  struct Pair {
    double d;
    std::size_t i, j;
  };
  std::vector<Pair> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs.push_back({distance(pos[i], pos[j]), i, j});
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return a.d < b.d || (a.d == b.d && (a.i < b.i || (a.i == b.i && a.j < b.j)));
  });

  // Component sizes only grow as the radius sweeps the sorted distances, so
  // the first distance at which a component reaches the target is minimal.
  DisjointSets sets(n);
  for (const auto& pr : pairs) {
    if (sets.unite(pr.i, pr.j) >= target) return pr.d;
  }
  return pairs.back().d;
}

Component giant_component(const UndirectedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> label(n, n);
  std::vector<std::size_t> best;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] != n) continue;
    std::vector<std::size_t> comp{s};
    label[s] = s;
    for (std::size_t k = 0; k < comp.size(); ++k) {
      for (std::size_t w : g.neighbors(comp[k])) {
        if (label[w] == n) {
          label[w] = s;
          comp.push_back(w);
        }
      }
    }
    if (comp.size() > best.size()) best = std::move(comp);
  }
  std::sort(best.begin(), best.end());

  std::vector<std::size_t> index(n, n);
  for (std::size_t k = 0; k < best.size(); ++k) index[best[k]] = k;
  Component out{UndirectedGraph(best.size()), best};
  for (const auto& [i, j] : g.edges()) {
    if (index[i] != n && index[j] != n) out.graph.add_edge(index[i], index[j]);
  }
  return out;
}

RggInstance make_rgg_instance(std::size_t p0, double c, std::uint64_t seed, double target_fraction) {
  RggInstance inst;
  inst.positions = interpolated_positions(p0, c, seed);
  inst.radius = threshold_for_giant(inst.positions, target_fraction);
  inst.giant = giant_component(geometric_graph(inst.positions, inst.radius));
  return inst;
}

UndirectedGraph CycleGrowth::graph_at(std::size_t k) const {
  if (k > added.size()) throw InvalidInput("cycle growth prefix out of range");
  UndirectedGraph g(p);
  for (std::size_t i = 0; i < p; ++i) g.add_edge(i, (i + 1) % p);
  for (std::size_t e = 0; e < k; ++e) g.add_edge(added[e].first, added[e].second);
  return g;
}

CycleGrowth grow_cycle(std::size_t p, std::size_t extra_edges, std::uint64_t seed) {
  if (p < 3) throw InvalidInput("a cycle needs at least 3 nodes");
  const std::size_t pool_size = p * (p - 1) / 2 - p;
  if (extra_edges > pool_size) {
    throw InvalidInput("cannot add " + std::to_string(extra_edges) + " edges; only " +
                       std::to_string(pool_size) + " non-cycle pairs exist");
  }
  std::vector<Edge> pool;
  pool.reserve(pool_size);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      const bool on_cycle = j == i + 1 || (i == 0 && j == p - 1);
      if (!on_cycle) pool.emplace_back(i, j);
    }
  }
  // Partial Fisher-Yates: position e is uniform over the pairs not yet taken.
  Rng rng(seed);
  for (std::size_t e = 0; e < extra_edges; ++e) {
    const std::size_t pick = e + uniform_index(rng, pool.size() - e);
    std::swap(pool[e], pool[pick]);
  }
  pool.resize(extra_edges);
  return {p, std::move(pool)};
}

std::vector<UndirectedGraph> cycle_with_edges(std::size_t p, std::size_t extra_edges, std::uint64_t seed) {
  const CycleGrowth growth = grow_cycle(p, extra_edges, seed);
  std::vector<UndirectedGraph> out;
  out.reserve(extra_edges + 1);
  UndirectedGraph g = growth.graph_at(0);
  out.push_back(g);
  for (const auto& [i, j] : growth.added) {
    g.add_edge(i, j);
    out.push_back(g);
  }
  return out;
}

void write_edge_list(std::ostream& out, const UndirectedGraph& g) {
  out << g.node_count() << ' ' << g.edge_count() << '\n';
  for (const auto& [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

UndirectedGraph read_edge_list(std::istream& in) {
  long long p = -1;
  long long m = -1;
  if (!(in >> p >> m) || p <= 0 || m < 0) {
    throw InvalidInput("edge list: expected header \"p m\" with p > 0 and m >= 0");
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long e = 0; e < m; ++e) {
    long long i = -1;
    long long j = -1;
    if (!(in >> i >> j)) {
      throw InvalidInput("edge list: expected " + std::to_string(m) + " edges, got " + std::to_string(e));
    }
    if (i < 0 || j < 0 || i >= p || j >= p) {
      throw InvalidInput("edge list: endpoint out of range on edge " + std::to_string(e));
    }
    edges.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  std::string trailing;
  if (in >> trailing) throw InvalidInput("edge list: trailing content after " + std::to_string(m) + " edges");
  return UndirectedGraph(static_cast<std::size_t>(p), edges);
}

UndirectedGraph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open edge list " + path);
  return read_edge_list(in);
}

void write_edge_list_file(const std::string& path, const UndirectedGraph& g) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write edge list " + path);
  write_edge_list(out, g);
}

}  // namespace pushsum
