#include "tlb/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include "tlb/error.hpp"
#include "tlb/rng.hpp"

namespace tlb {

namespace {

bool connected(std::size_t n, const std::vector<std::vector<NodeId>>& adj) {
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::queue<NodeId> q;
  q.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!q.empty()) {
    const NodeId u = q.front();
    q.pop();
    for (NodeId w : adj[u]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        q.push(w);
      }
    }
  }
  return reached == n;
}

std::size_t param(std::span<const std::int64_t> params, std::size_t i, const char* kind, const char* name,
                  std::int64_t min_value) {
  require(params.size() > i, std::string(kind) + ": missing parameter '" + name + "'");
  require(params[i] >= min_value,
          std::string(kind) + ": parameter '" + name + "' must be >= " + std::to_string(min_value));
  return static_cast<std::size_t>(params[i]);
}

void expect_arity(std::span<const std::int64_t> params, std::size_t n, const char* kind) {
  require(params.size() == n, std::string(kind) + ": expected " + std::to_string(n) + " parameter(s), got " +
                                  std::to_string(params.size()));
}

Graph complete_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  return Graph::from_edges(n, std::move(edges));
}

Graph cycle_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u) edges.emplace_back(u, static_cast<NodeId>((u + 1) % n));
  return Graph::from_edges(n, std::move(edges));
}

Graph path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u + 1 < n; ++u) edges.emplace_back(u, u + 1);
  return Graph::from_edges(n, std::move(edges));
}

Graph grid_graph(std::size_t rows, std::size_t cols) {
  std::vector<Edge> edges;
  auto id = [cols](std::size_t r, std::size_t c) { return static_cast<NodeId>(r * cols + c); };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < rows) edges.emplace_back(id(r, c), id(r + 1, c));
    }
  }
  return Graph::from_edges(rows * cols, std::move(edges));
}

constexpr int kMaxAttempts = 1000;

// Configuration model with rejection of loops, multi-edges and disconnected samples.
Graph random_regular_graph(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<NodeId> stubs;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    stubs.clear();
    for (NodeId v = 0; v < n; ++v)
      for (std::size_t j = 0; j < d; ++j) stubs.push_back(v);
    for (std::size_t i = stubs.size(); i > 1; --i) std::swap(stubs[i - 1], stubs[rng.below(i)]);
    std::set<Edge> seen;
    bool ok = true;
    for (std::size_t i = 0; i < stubs.size(); i += 2) {
      NodeId a = stubs[i], b = stubs[i + 1];
      if (a == b) { ok = false; break; }
      if (a > b) std::swap(a, b);
      if (!seen.emplace(a, b).second) { ok = false; break; }
    }
    if (!ok) continue;
    std::vector<std::vector<NodeId>> adj(n);
    for (auto [a, b] : seen) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    if (!connected(n, adj)) continue;
    return Graph::from_edges(n, {seen.begin(), seen.end()});
  }
  fail(ErrorCode::numeric, "random_regular: no simple connected sample after 1000 attempts");
}

Graph erdos_renyi_connected_graph(std::size_t n, std::size_t per_mille, std::uint64_t seed) {
  Rng rng(seed);
  const double p = static_cast<double>(per_mille) / 1000.0;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<Edge> edges;
    std::vector<std::vector<NodeId>> adj(n);
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) {
        if (rng.unit() < p) {
          edges.emplace_back(u, v);
          adj[u].push_back(v);
          adj[v].push_back(u);
        }
      }
    }
    if (connected(n, adj)) return Graph::from_edges(n, std::move(edges));
  }
  fail(ErrorCode::numeric, "erdos_renyi_connected: graph still disconnected after 1000 attempts");
}

// Cross edge j = q*h + r joins V1 vertex r with V2 vertex h + (r + q) mod h.
// Since k < h*h, each (r, q) pair is distinct, and every vertex on either side
// receives floor(k/h) or ceil(k/h) cross edges.
Graph two_clique_graph(std::size_t n, std::size_t k) {
  require(n % 2 == 0, "two_clique: n must be even (got " + std::to_string(n) + ")");
  require(n >= 4, "two_clique: n must be >= 4");
  require(k >= 1, "two_clique: k must be >= 1");
  require(5 * k <= n * n, "two_clique: k must satisfy k <= n^2/5 (n=" + std::to_string(n) +
                              ", k=" + std::to_string(k) + ")");
  const std::size_t h = n / 2;
  std::vector<Edge> edges;
  for (NodeId u = 0; u < h; ++u)
    for (NodeId v = u + 1; v < h; ++v) {
      edges.emplace_back(u, v);
      edges.emplace_back(static_cast<NodeId>(u + h), static_cast<NodeId>(v + h));
    }
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t q = j / h, r = j % h;
    edges.emplace_back(static_cast<NodeId>(r), static_cast<NodeId>(h + (r + q) % h));
  }
  return Graph::from_edges(n, std::move(edges));
}

}  // namespace

Graph Graph::from_edges(std::size_t n, std::vector<Edge> edges) {
  require(n >= 2, "graph must have at least 2 nodes");
  for (auto& [u, v] : edges) {
    require(u < n && v < n, "edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
    require(u != v, "self-loop at node " + std::to_string(u));
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  auto dup = std::adjacent_find(edges.begin(), edges.end());
  require(dup == edges.end(),
          dup == edges.end() ? "" : "duplicate edge (" + std::to_string(dup->first) + "," + std::to_string(dup->second) + ")");
  Graph g;
  g.adjacency_.assign(n, {});
  for (auto [u, v] : edges) {
    g.adjacency_[u].push_back(v);
    g.adjacency_[v].push_back(u);
  }
  for (auto& list : g.adjacency_) std::sort(list.begin(), list.end());
  require(connected(n, g.adjacency_), "graph is not connected");
  g.edges_ = std::move(edges);
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  const auto& list = adjacency_.at(u);
  return std::binary_search(list.begin(), list.end(), v);
}

bool Graph::is_regular() const {
  return std::all_of(adjacency_.begin(), adjacency_.end(),
                     [&](const auto& list) { return list.size() == adjacency_.front().size(); });
}

GeneratorKind parse_generator_kind(std::string_view name) {
  if (name == "complete") return GeneratorKind::complete;
  if (name == "cycle") return GeneratorKind::cycle;
  if (name == "path") return GeneratorKind::path;
  if (name == "grid") return GeneratorKind::grid;
  if (name == "random_regular") return GeneratorKind::random_regular;
  if (name == "erdos_renyi_connected") return GeneratorKind::erdos_renyi_connected;
  if (name == "two_clique") return GeneratorKind::two_clique;
  fail(ErrorCode::invalid_argument, "unknown generator '" + std::string(name) + "'");
}

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::complete: return "complete";
    case GeneratorKind::cycle: return "cycle";
    case GeneratorKind::path: return "path";
    case GeneratorKind::grid: return "grid";
    case GeneratorKind::random_regular: return "random_regular";
    case GeneratorKind::erdos_renyi_connected: return "erdos_renyi_connected";
    case GeneratorKind::two_clique: return "two_clique";
  }
  return "?";
}

Graph generate(GeneratorKind kind, std::span<const std::int64_t> params, std::uint64_t seed) {
  switch (kind) {
    case GeneratorKind::complete:
      expect_arity(params, 1, "complete");
      return complete_graph(param(params, 0, "complete", "n", 2));
    case GeneratorKind::cycle:
      expect_arity(params, 1, "cycle");
      return cycle_graph(param(params, 0, "cycle", "n", 3));
    case GeneratorKind::path:
      expect_arity(params, 1, "path");
      return path_graph(param(params, 0, "path", "n", 2));
    case GeneratorKind::grid: {
      expect_arity(params, 2, "grid");
      const auto rows = param(params, 0, "grid", "rows", 1);
      const auto cols = param(params, 1, "grid", "cols", 1);
      require(rows * cols >= 2, "grid: needs at least 2 nodes");
      return grid_graph(rows, cols);
    }
    case GeneratorKind::random_regular: {
      expect_arity(params, 2, "random_regular");
      const auto n = param(params, 0, "random_regular", "n", 3);
      const auto d = param(params, 1, "random_regular", "d", 2);
      require(d < n, "random_regular: d must be < n");
      require((n * d) % 2 == 0, "random_regular: n*d must be even");
      return random_regular_graph(n, d, seed);
    }
    case GeneratorKind::erdos_renyi_connected: {
      expect_arity(params, 2, "erdos_renyi_connected");
      const auto n = param(params, 0, "erdos_renyi_connected", "n", 2);
      const auto pm = param(params, 1, "erdos_renyi_connected", "p_per_mille", 1);
      require(pm <= 1000, "erdos_renyi_connected: p_per_mille must be <= 1000");
      return erdos_renyi_connected_graph(n, pm, seed);
    }
    case GeneratorKind::two_clique:
      expect_arity(params, 2, "two_clique");
      return two_clique_graph(param(params, 0, "two_clique", "n", 4), param(params, 1, "two_clique", "k", 1));
  }
  fail(ErrorCode::internal, "unhandled generator kind");
}

Graph generate(std::string_view kind, std::span<const std::int64_t> params, std::uint64_t seed) {
  return generate(parse_generator_kind(kind), params, seed);
}

BipartiteResult is_bipartite(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<int> color(n, -1);
  std::queue<NodeId> q;
  color[0] = 0;
  q.push(0);
  while (!q.empty()) {
    const NodeId u = q.front();
    q.pop();
    for (NodeId w : g.neighbors(u)) {
      if (color[w] < 0) {
        color[w] = 1 - color[u];
        q.push(w);
      } else if (color[w] == color[u]) {
        return {};
      }
    }
  }
  Bipartition part;
  for (NodeId v = 0; v < n; ++v) (color[v] == 0 ? part.first : part.second).push_back(v);
  return {true, std::move(part)};
}

DegreeStats degree_stats(const Graph& g) {
  DegreeStats s;
  s.min_degree = g.degree(0);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    s.max_degree = std::max(s.max_degree, g.degree(v));
    s.min_degree = std::min(s.min_degree, g.degree(v));
  }
  const std::uint64_t num = 2 * g.edge_count(), den = g.node_count();
  const std::uint64_t d = std::gcd(num, den);
  s.avg_numerator = num / d;
  s.avg_denominator = den / d;
  return s;
}

std::optional<std::size_t> two_clique_cross_edges(const Graph& g) {
  const std::size_t n = g.node_count();
  if (n % 2 != 0 || n < 4) return std::nullopt;
  const std::size_t h = n / 2;
  std::size_t cross = 0;
  for (NodeId v = 0; v < n; ++v) {
    const bool left = v < h;
    std::size_t same = 0;
    for (NodeId w : g.neighbors(v)) {
      if ((w < h) == left) ++same;
      else if (left) ++cross;
    }
    if (same != h - 1) return std::nullopt;
  }
  return cross;
}

std::size_t cross_degree(const Graph& g, NodeId v) {
  const std::size_t h = g.node_count() / 2;
  const bool left = v < h;
  return static_cast<std::size_t>(
      std::count_if(g.neighbors(v).begin(), g.neighbors(v).end(), [&](NodeId w) { return (w < h) != left; }));
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  auto next_line = [&](const char* what) {
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) return;
    }
    fail(ErrorCode::io, std::string("edge list: unexpected end of input while reading ") + what);
  };
  next_line("header");
  std::istringstream header(line);
  long long n = -1, e = -1;
  require(static_cast<bool>(header >> n >> e) && n >= 0 && e >= 0, "edge list: malformed header '" + line + "'");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(e));
  for (long long i = 0; i < e; ++i) {
    next_line("edge");
    std::istringstream row(line);
    long long u = -1, v = -1;
    require(static_cast<bool>(row >> u >> v), "edge list: malformed edge line '" + line + "'");
    require(u >= 0 && v >= 0 && u < n && v < n, "edge list: node id out of range in '" + line + "'");
    require(u < v, "edge list: expected u < v in '" + line + "'");
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  while (std::getline(in, line)) {
    require(line.find_first_not_of(" \t\r") == std::string::npos, "edge list: more edges than declared");
  }
  return Graph::from_edges(static_cast<std::size_t>(n), std::move(edges));
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open '" + path + "'");
  return read_edge_list(in);
}

void write_edge_list(const Graph& g, std::ostream& out) {
  out << g.node_count() << ' ' << g.edge_count() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write '" + path + "'");
  write_edge_list(g, out);
}

}  // namespace tlb
