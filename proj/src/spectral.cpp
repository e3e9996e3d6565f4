#include "tlb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tlb/error.hpp"

namespace tlb {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

// Zeroes a(p, q) with a rotation in the (p, q) plane; only the eigenvalues are needed.
void rotate(Matrix& a, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const double akp = a(k, p), akq = a(k, q);
    a(k, p) = a(p, k) = c * akp - s * akq;
    a(k, q) = a(q, k) = s * akp + c * akq;
  }
  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = a(q, p) = 0.0;
}

// Solves m x = b in place by Gaussian elimination with partial pivoting.
std::vector<double> solve_dense(Matrix m, std::vector<double> b) {
  const std::size_t n = m.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
    if (std::abs(m(pivot, col)) < 1e-300) fail(ErrorCode::internal, "hitting-time system is singular");
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m(col, c), m(pivot, c));
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m(r, col) / m(col, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) m(r, c) -= f * m(col, c);
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= m(i, c) * x[c];
    x[i] = s / m(i, i);
  }
  return x;
}

void step(const Graph& g, const std::vector<double>& cur, std::vector<double>& next) {
  std::fill(next.begin(), next.end(), 0.0);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    if (cur[u] == 0.0) continue;
    const double share = cur[u] / static_cast<double>(g.degree(u));
    for (NodeId w : g.neighbors(u)) next[w] += share;
  }
}

}  // namespace

Matrix transition_matrix(const Graph& g) {
  Matrix p(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const double w = 1.0 / static_cast<double>(g.degree(u));
    for (NodeId v : g.neighbors(u)) p(u, v) = w;
  }
  return p;
}

std::vector<double> stationary(const Graph& g) {
  const double total = 2.0 * static_cast<double>(g.edge_count());
  std::vector<double> pi(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) pi[v] = static_cast<double>(g.degree(v)) / total;
  return pi;
}

std::vector<double> symmetric_eigenvalues(Matrix a, double tolerance, int max_sweeps) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      require(std::abs(a(i, j) - a(j, i)) <= 1e-12 * (1.0 + std::abs(a(i, j))), "matrix is not symmetric");
  int sweeps = 0;
  while (off_diagonal_norm(a) >= tolerance) {
    if (sweeps++ >= max_sweeps)
      fail(ErrorCode::numeric, "Jacobi eigensolver did not converge within " + std::to_string(max_sweeps) + " sweeps");
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, p, q);
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

std::vector<double> walk_spectrum(const Graph& g) {
  const std::size_t n = g.node_count();
  Matrix nmat(n);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v : g.neighbors(u))
      nmat(u, v) = 1.0 / std::sqrt(static_cast<double>(g.degree(u)) * static_cast<double>(g.degree(v)));
  return symmetric_eigenvalues(std::move(nmat));
}

double spectral_gap_from_spectrum(const std::vector<double>& eigenvalues) {
  double largest = 0.0;
  for (std::size_t i = 1; i < eigenvalues.size(); ++i) {
    const double m = std::abs(eigenvalues[i]);
    if (m < 1.0 - kUnitModulusTolerance) largest = std::max(largest, m);
  }
  return 1.0 - largest;
}

double spectral_gap(const Graph& g) { return spectral_gap_from_spectrum(walk_spectrum(g)); }

std::uint64_t mixing_time(std::size_t n, double mu) {
  require(mu > 0.0 && mu <= 1.0, "spectral gap must lie in (0, 1]");
  return static_cast<std::uint64_t>(std::ceil(4.0 * std::log(static_cast<double>(n)) / mu));
}

std::uint64_t mixing_time(const Graph& g) { return mixing_time(g.node_count(), spectral_gap(g)); }

Matrix hitting_times(const Graph& g) {
  const std::size_t n = g.node_count();
  Matrix h(n);
  // Reduced system over V \ {target}: h(u) - sum_w P(u,w) h(w) = 1.
  for (NodeId target = 0; target < n; ++target) {
    std::vector<std::size_t> index(n, n);
    std::size_t k = 0;
    for (NodeId u = 0; u < n; ++u)
      if (u != target) index[u] = k++;
    Matrix m(n - 1);
    std::vector<double> rhs(n - 1, 1.0);
    for (NodeId u = 0; u < n; ++u) {
      if (u == target) continue;
      const std::size_t r = index[u];
      m(r, r) += 1.0;
      const double w = 1.0 / static_cast<double>(g.degree(u));
      for (NodeId v : g.neighbors(u))
        if (v != target) m(r, index[v]) -= w;
    }
    const auto x = solve_dense(std::move(m), std::move(rhs));
    for (NodeId u = 0; u < n; ++u) h(u, target) = (u == target) ? 0.0 : x[index[u]];
  }
  return h;
}

double max_entry(const Matrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) best = std::max(best, m(i, j));
  return best;
}

std::vector<double> walk_distribution(const Graph& g, NodeId start, std::uint64_t t) {
  require(start < g.node_count(), "start node out of range");
  std::vector<double> cur(g.node_count(), 0.0), next(g.node_count());
  cur[start] = 1.0;
  for (std::uint64_t i = 0; i < t; ++i) {
    step(g, cur, next);
    cur.swap(next);
  }
  return cur;
}

MixingLemmaReport verify_mixing_lemma(const Graph& g) {
  const std::size_t n = g.node_count();
  const auto pi = stationary(g);
  const auto bip = is_bipartite(g);
  std::vector<int> side(n, 0);
  if (bip.bipartite)
    for (NodeId v : bip.partition->second) side[v] = 1;

  MixingLemmaReport report;
  report.t = mixing_time(g);
  report.bound = std::pow(static_cast<double>(n), -3.0);

  auto predicted = [&](NodeId u, NodeId v, std::uint64_t t) {
    if (!bip.bipartite) return pi[v];
    const bool same = side[u] == side[v];
    const bool even = (t % 2) == 0;
    // same side: 1 + (-1)^t; opposite side: 1 + (-1)^{t+1}
    return pi[v] * ((same == even) ? 2.0 : 0.0);
  };

  std::vector<double> next(n);
  for (NodeId u = 0; u < n; ++u) {
    auto dist = walk_distribution(g, u, report.t);
    for (NodeId v = 0; v < n; ++v)
      report.max_deviation = std::max(report.max_deviation, std::abs(dist[v] - predicted(u, v, report.t)));
    if (bip.bipartite) {
      step(g, dist, next);
      for (NodeId v = 0; v < n; ++v)
        report.max_deviation = std::max(report.max_deviation, std::abs(next[v] - predicted(u, v, report.t + 1)));
    }
  }
  report.pass = report.max_deviation <= report.bound;
  return report;
}

WalkAnalysis analyze(const Graph& g) {
  WalkAnalysis a;
  a.pi = stationary(g);
  a.eigenvalues = walk_spectrum(g);
  a.mu = spectral_gap_from_spectrum(a.eigenvalues);
  a.mix_time = mixing_time(g.node_count(), a.mu);
  a.hitting = hitting_times(g);
  a.max_hitting = max_entry(a.hitting);
  a.bipartite = is_bipartite(g).bipartite;
  return a;
}

}  // namespace tlb
