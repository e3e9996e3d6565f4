#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tlb {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;  // first < second

// Undirected, simple, connected graph on dense node ids 0..n-1. Immutable once built.
class Graph {
 public:
  // Validates simplicity and connectivity; edges may be given in any order and orientation.
  static Graph from_edges(std::size_t n, std::vector<Edge> edges);

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_.at(v); }
  std::size_t degree(NodeId v) const { return adjacency_.at(v).size(); }
  bool has_edge(NodeId u, NodeId v) const;
  bool is_regular() const;

  friend bool operator==(const Graph& a, const Graph& b) { return a.edges_ == b.edges_ && a.node_count() == b.node_count(); }

 private:
  Graph() = default;
  std::vector<Edge> edges_;                     // sorted lexicographically
  std::vector<std::vector<NodeId>> adjacency_;  // each list ascending
};

struct DegreeStats {
  std::size_t max_degree = 0;
  // 2|E|/n kept as an exact fraction.
  std::uint64_t avg_numerator = 0;
  std::uint64_t avg_denominator = 1;
  std::size_t min_degree = 0;

  double average() const { return static_cast<double>(avg_numerator) / static_cast<double>(avg_denominator); }
};

struct Bipartition {
  std::vector<NodeId> first;   // contains node 0
  std::vector<NodeId> second;
};

struct BipartiteResult {
  bool bipartite = false;
  std::optional<Bipartition> partition;
};

enum class GeneratorKind { complete, cycle, path, grid, random_regular, erdos_renyi_connected, two_clique };

GeneratorKind parse_generator_kind(std::string_view name);
std::string_view to_string(GeneratorKind kind);

// Parameters per kind:
//   complete(n), cycle(n), path(n), grid(rows, cols), random_regular(n, d),
//   erdos_renyi_connected(n, edge probability in per-mille), two_clique(n, k).
Graph generate(GeneratorKind kind, std::span<const std::int64_t> params, std::uint64_t seed);
Graph generate(std::string_view kind, std::span<const std::int64_t> params, std::uint64_t seed);

BipartiteResult is_bipartite(const Graph& g);
DegreeStats degree_stats(const Graph& g);

// Two-clique structure: nodes [0, n/2) and [n/2, n) are cliques. Returns the
// number of cross edges, or nullopt when `g` does not have that shape.
std::optional<std::size_t> two_clique_cross_edges(const Graph& g);
std::size_t cross_degree(const Graph& g, NodeId v);

// Edge-list text format: "n e" then e lines "u v" with u < v.
Graph read_edge_list(std::istream& in);
Graph load_edge_list(const std::string& path);
void write_edge_list(const Graph& g, std::ostream& out);
void save_edge_list(const Graph& g, const std::string& path);

}  // namespace tlb
