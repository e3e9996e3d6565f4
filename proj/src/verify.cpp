#include "tlb/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>

#include "tlb/error.hpp"
#include "tlb/experiments.hpp"
#include "tlb/graph.hpp"
#include "tlb/oracle.hpp"
#include "tlb/protocols.hpp"
#include "tlb/rng.hpp"
#include "tlb/spectral.hpp"
#include "tlb/threshold_model.hpp"

namespace tlb {

namespace {

using Suite = bool (*)(std::uint64_t seed, std::string& detail);

struct Fixture {
  std::string label;
  Graph graph;
};

Graph gen(GeneratorKind kind, std::vector<std::int64_t> params, std::uint64_t seed = 0) {
  return generate(kind, params, seed);
}

std::vector<Fixture> catalog(std::uint64_t seed) {
  using K = GeneratorKind;
  return {
      {"complete4", gen(K::complete, {4})},
      {"complete8", gen(K::complete, {8})},
      {"cycle5", gen(K::cycle, {5})},
      {"cycle7", gen(K::cycle, {7})},
      {"cycle8", gen(K::cycle, {8})},
      {"path3", gen(K::path, {3})},
      {"grid3x4", gen(K::grid, {3, 4})},
      {"random_regular12_3", gen(K::random_regular, {12, 3}, seed)},
      {"erdos_renyi16", gen(K::erdos_renyi_connected, {16, 300}, seed)},
      {"two_clique10_5", gen(K::two_clique, {10, 5})},
      {"two_clique20_7", gen(K::two_clique, {20, 7})},
  };
}

// Random connected graph with n <= max_n for the property loops.
Graph random_graph(Rng& rng, std::size_t max_n) {
  const auto n = static_cast<std::int64_t>(3 + rng.below(max_n - 2));
  switch (rng.below(5)) {
    case 0: return gen(GeneratorKind::cycle, {n});
    case 1: return gen(GeneratorKind::path, {n});
    case 2: return gen(GeneratorKind::complete, {std::min<std::int64_t>(n, 12)});
    case 3: return gen(GeneratorKind::erdos_renyi_connected, {n, 350}, rng.next());
    default: {
      const std::int64_t even = std::max<std::int64_t>(4, n - n % 2);
      const std::int64_t k = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(even * even / 5)));
      return gen(GeneratorKind::two_clique, {even, k});
    }
  }
}

ThresholdKind random_kind(Rng& rng) { return static_cast<ThresholdKind>(rng.below(3)); }

State random_state(Rng& rng, std::size_t m, std::size_t n) {
  std::vector<NodeId> a(m);
  for (auto& v : a) v = static_cast<NodeId>(rng.below(n));
  return State::from_assignment(std::move(a), n);
}

// Thresholds drawn independently in [1, hi], feasible or not.
ThresholdSpec random_thresholds(Rng& rng, ThresholdKind kind, std::size_t m, std::size_t n, std::int64_t hi) {
  auto draw = [&](std::size_t count) {
    std::vector<std::int64_t> t(count);
    for (auto& x : t) x = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi)));
    return t;
  };
  switch (kind) {
    case ThresholdKind::user_independent: return ThresholdSpec::user_independent(m, draw(n));
    case ThresholdKind::resource_independent: return ThresholdSpec::resource_independent(draw(m), n);
    case ThresholdKind::arbitrary: break;
  }
  return ThresholdSpec::arbitrary(m, n, draw(m * n));
}

bool connected_by_bfs(const Graph& g) {
  std::vector<char> seen(g.node_count(), 0);
  std::queue<NodeId> q;
  q.push(0);
  seen[0] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    const NodeId v = q.front();
    q.pop();
    for (NodeId u : g.neighbors(v))
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        q.push(u);
      }
  }
  return count == g.node_count();
}

// Every user either stayed or crossed one edge; loads add up.
bool round_is_local(const State& before, const State& after, const Graph& g) {
  if (after.users() != before.users()) return false;
  after.validate();
  std::int64_t sum = 0;
  for (auto x : after.load) sum += x;
  if (sum != static_cast<std::int64_t>(before.users())) return false;
  for (std::size_t i = 0; i < before.users(); ++i)
    if (before.assignment[i] != after.assignment[i] && !g.has_edge(before.assignment[i], after.assignment[i]))
      return false;
  return true;
}

bool suite_graph(std::uint64_t seed, std::string& detail) {
  for (const auto& f : catalog(seed)) {
    const Graph& g = f.graph;
    std::size_t deg_sum = 0;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      deg_sum += g.degree(v);
      const auto nb = g.neighbors(v);
      if (!std::is_sorted(nb.begin(), nb.end())) return detail = f.label + ": adjacency not sorted", false;
      for (NodeId u : nb)
        if (u == v || !g.has_edge(u, v)) return detail = f.label + ": adjacency inconsistent", false;
    }
    if (deg_sum != 2 * g.edge_count()) return detail = f.label + ": degree sum != 2|E|", false;
    if (!connected_by_bfs(g)) return detail = f.label + ": BFS does not reach every node", false;
    const auto ds = degree_stats(g);
    const double d = ds.average();
    if (ds.min_degree < 1 || static_cast<double>(ds.min_degree) > d || d > static_cast<double>(ds.max_degree))
      return detail = f.label + ": degree stats out of order", false;
    const auto bp = is_bipartite(g);
    if (bp.bipartite) {
      const auto& part = *bp.partition;
      std::vector<int> side(g.node_count(), -1);
      for (NodeId v : part.first) side[v] = 0;
      for (NodeId v : part.second) side[v] = 1;
      if (side[0] != 0) return detail = f.label + ": node 0 not in the first side", false;
      for (const auto& [u, v] : g.edges())
        if (side[u] == side[v]) return detail = f.label + ": partition has an internal edge", false;
    }
    if (const auto k = two_clique_cross_edges(g)) {
      const double share = static_cast<double>(*k) / static_cast<double>(g.node_count() / 2);
      for (NodeId v = 0; v < g.node_count(); ++v)
        if (std::abs(static_cast<double>(cross_degree(g, v)) - share) >= 1.0)
          return detail = f.label + ": uneven cross degrees", false;
    }
    std::stringstream io;
    write_edge_list(g, io);
    if (!(read_edge_list(io) == g)) return detail = f.label + ": edge-list round trip differs", false;
  }
  const std::int64_t rr[] = {16, 3}, er[] = {16, 250};
  if (!(generate(GeneratorKind::random_regular, rr, seed) == generate(GeneratorKind::random_regular, rr, seed)) ||
      !(generate(GeneratorKind::erdos_renyi_connected, er, seed) ==
        generate(GeneratorKind::erdos_renyi_connected, er, seed)))
    return detail = "generators are not reproducible", false;
  detail = "catalog of " + std::to_string(catalog(seed).size()) + " graphs";
  return true;
}

bool suite_stationary(std::uint64_t seed, std::string& detail) {
  auto graphs = catalog(seed);
  graphs.push_back({"cycle64", gen(GeneratorKind::cycle, {64})});
  graphs.push_back({"complete64", gen(GeneratorKind::complete, {64})});
  graphs.push_back({"random_regular64_4", gen(GeneratorKind::random_regular, {64, 4}, seed)});
  graphs.push_back({"grid8x8", gen(GeneratorKind::grid, {8, 8})});
  double worst = 0.0;
  for (const auto& f : graphs) {
    const auto pi = stationary(f.graph);
    const Matrix p = transition_matrix(f.graph);
    const std::size_t n = f.graph.node_count();
    for (std::size_t v = 0; v < n; ++v) {
      double acc = 0.0;
      for (std::size_t u = 0; u < n; ++u) acc += pi[u] * p(u, v);
      worst = std::max(worst, std::abs(acc - pi[v]));
    }
  }
  std::ostringstream os;
  os << "max |piP - pi| = " << worst;
  detail = os.str();
  return worst <= 1e-12;
}

bool suite_spectrum(std::uint64_t seed, std::string& detail) {
  for (const auto& f : catalog(seed)) {
    const auto ev = walk_spectrum(f.graph);
    if (!std::is_sorted(ev.rbegin(), ev.rend())) return detail = f.label + ": eigenvalues not non-increasing", false;
    if (std::abs(ev.front() - 1.0) > 1e-9) return detail = f.label + ": lambda_1 != 1", false;
    const bool minus_one = std::abs(ev.back() + 1.0) <= 1e-9;
    if (minus_one != is_bipartite(f.graph).bipartite)
      return detail = f.label + ": lambda_n = -1 disagrees with bipartiteness", false;
  }
  detail = "ordering, lambda_1 and bipartite lambda_n checked";
  return true;
}

bool suite_mixing_lemma(std::uint64_t seed, std::string& detail) {
  using K = GeneratorKind;
  std::vector<Fixture> graphs = {
      {"complete4", gen(K::complete, {4})},         {"complete8", gen(K::complete, {8})},
      {"cycle5", gen(K::cycle, {5})},               {"cycle7", gen(K::cycle, {7})},
      {"two_clique10_5", gen(K::two_clique, {10, 5})}, {"cycle4", gen(K::cycle, {4})},
      {"cycle8", gen(K::cycle, {8})},               {"grid3x3", gen(K::grid, {3, 3})},
      {"grid2x4", gen(K::grid, {2, 4})},
  };
  for (std::uint64_t i = 0; i < 3; ++i)
    graphs.push_back({"erdos_renyi12", gen(K::erdos_renyi_connected, {12, 400}, derive_seed(seed, {i}))});
  double worst_ratio = 0.0;
  for (const auto& f : graphs) {
    const auto r = verify_mixing_lemma(f.graph);
    worst_ratio = std::max(worst_ratio, r.max_deviation / r.bound);
    if (!r.pass) {
      std::ostringstream os;
      os << f.label << ": deviation " << r.max_deviation << " > " << r.bound;
      detail = os.str();
      return false;
    }
  }
  std::ostringstream os;
  os << graphs.size() << " graphs, worst deviation/bound = " << worst_ratio;
  detail = os.str();
  return true;
}

bool suite_hitting(std::uint64_t seed, std::string& detail) {
  for (std::size_t n : {4u, 8u, 16u, 32u}) {
    const std::int64_t nn = static_cast<std::int64_t>(n);
    const Matrix hc = hitting_times(gen(GeneratorKind::complete, {nn}));
    const Matrix hy = hitting_times(gen(GeneratorKind::cycle, {nn}));
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = 0; v < n; ++v) {
        if (std::abs(hc(u, v) - oracle::closed_form_hitting(oracle::ClosedFormKind::complete, n, u, v)) > 1e-9 ||
            std::abs(hy(u, v) - oracle::closed_form_hitting(oracle::ClosedFormKind::cycle, n, u, v)) > 1e-9)
          return detail = "closed form mismatch at n=" + std::to_string(n), false;
      }
  }
  double worst = 0.0;
  for (auto kind : {GeneratorKind::complete, GeneratorKind::cycle})
    for (std::int64_t n : {4, 8}) {
      const Graph g = gen(kind, {n});
      const Matrix h = hitting_times(g);
      for (NodeId u = 0; u < g.node_count(); ++u)
        for (NodeId v = 0; v < g.node_count(); ++v) {
          if (u == v) continue;
          const auto est = oracle::monte_carlo_hitting(g, u, v, 10'000, derive_seed(seed, {u, v}));
          if (est.cap_hits) return detail = "Monte Carlo walk hit the step cap", false;
          worst = std::max(worst, std::abs(est.mean - h(u, v)) / h(u, v));
        }
    }
  std::ostringstream os;
  os << "closed forms within 1e-9; worst Monte Carlo relative error " << worst;
  detail = os.str();
  return worst <= 0.05;
}

bool suite_potential(std::uint64_t seed, std::string& detail) {
  Rng rng(seed);
  std::size_t balanced = 0, holes_checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(7), m = 1 + rng.below(20);
    const auto kind = random_kind(rng);
    const auto spec = random_thresholds(rng, kind, m, n, 1 + static_cast<std::int64_t>(m / n) + 2);
    const State s = random_state(rng, m, n);
    const auto phi = potential(s, spec);
    const bool bal = is_balanced(s, spec);
    balanced += bal ? 1 : 0;
    if ((phi.total == 0) != bal) return detail = "Phi = 0 disagrees with is_balanced", false;
    if (potential_by_ranking(s, spec).per_resource != phi.per_resource)
      return detail = "ranking potential differs from the fast path", false;
    if (kind == ThresholdKind::user_independent)
      for (NodeId v = 0; v < n; ++v)
        if (phi.per_resource[v] != std::max<std::int64_t>(s.load[v] - spec.at(0, v), 0))
          return detail = "user-independent Phi_v != max(x_v - T_v, 0)", false;

    std::int64_t lo = spec.at(0, 0);
    for (UserId i = 0; i < m; ++i)
      for (NodeId v = 0; v < n; ++v) lo = std::min(lo, spec.at(i, v));
    const auto avg = static_cast<std::int64_t>((m + n - 1) / n);
    if (lo != spec.min_threshold() || avg != spec.average() || (lo > avg) != spec.is_above_average() ||
        std::abs(spec.eps_min() - (static_cast<double>(lo) / static_cast<double>(avg) - 1.0)) > 1e-15)
      return detail = "eps_min / above-average flags disagree with the table", false;

    // Holes bound on feasible user-independent and above-average instances.
    const auto kind2 = rng.below(2) ? ThresholdKind::user_independent : random_kind(rng);
    const auto feasible = random_feasible_thresholds(kind2, m, n, rng);
    if (feasible.kind() == ThresholdKind::user_independent || feasible.is_above_average()) {
      const State s2 = random_state(rng, m, n);
      if (potential(s2, feasible).total > holes(s2, feasible).total) return detail = "Phi exceeds total holes", false;
      ++holes_checked;
    }
  }
  detail = "1000 states (" + std::to_string(balanced) + " balanced), holes checked on " +
           std::to_string(holes_checked);
  return true;
}

bool suite_conservation(std::uint64_t seed, std::string& detail) {
  Rng rng(seed);
  for (int trial = 0; trial < 400; ++trial) {
    const Graph g = random_graph(rng, 16);
    const std::size_t n = g.node_count(), m = 1 + rng.below(4 * n);
    const bool user_mode = rng.below(2) == 1;
    const auto spec = random_feasible_thresholds(user_mode ? ThresholdKind::user_independent : random_kind(rng), m, n, rng);
    ProtocolConfig cfg;
    cfg.mode = user_mode ? Mode::user_controlled : Mode::resource_controlled;
    cfg.migration_rule = rng.below(2) ? MigrationRule::stated : MigrationRule::analysis;
    State s = random_state(rng, m, n);
    for (int r = 0; r < 20; ++r) {
      const auto next = user_mode ? user_round(s, g, spec, cfg, rng) : resource_round(s, g, spec, rng);
      if (!round_is_local(s, next.state, g)) return detail = "a round broke conservation or locality", false;
      s = next.state;
    }
  }
  // Balanced states are fixed points of both rounds.
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = random_graph(rng, 16);
    const std::size_t n = g.node_count(), m = 1 + rng.below(4 * n);
    const auto spec = ThresholdSpec::above_average(m, n, 0.25);
    ProtocolConfig cfg;
    RunOptions opt;
    opt.max_rounds = 1'000'000;
    const auto trace = run(random_state(rng, m, n), g, spec, cfg, opt, rng.next());
    if (!trace.converged) return detail = "resource-controlled run did not balance", false;
    const State& b = trace.final_state;
    cfg.mode = Mode::user_controlled;
    if (!(resource_round(b, g, spec, rng).state == b) || !(user_round(b, g, spec, cfg, rng).state == b))
      return detail = "balanced state moved", false;
  }
  detail = "8000 random rounds, 100 balanced fixed points";
  return true;
}

bool suite_monotonicity(std::uint64_t seed, std::string& detail) {
  Rng rng(seed);
  std::uint64_t rounds = 0;
  while (rounds < 100'000) {
    const Graph g = random_graph(rng, 32);
    const std::size_t n = g.node_count(), m = 1 + rng.below(6 * n);
    const auto spec = random_feasible_thresholds(random_kind(rng), m, n, rng);
    State s = random_state(rng, m, n);
    std::int64_t phi = potential(s, spec).total;
    for (int r = 0; r < 50; ++r, ++rounds) {
      s = resource_round(s, g, spec, rng).state;
      const std::int64_t next = potential(s, spec).total;
      if (next > phi) return detail = "Phi increased after " + std::to_string(rounds) + " rounds", false;
      phi = next;
    }
  }
  detail = std::to_string(rounds) + " resource-controlled rounds, Phi never increased";
  return true;
}

bool suite_excess_walks(std::uint64_t seed, std::string& detail) {
  const Graph g = gen(GeneratorKind::cycle, {8});
  const std::size_t n = 8, m = 64;
  const auto spec = ThresholdSpec::user_independent(m, std::vector<std::int64_t>(n, 8));
  const auto start = [&](std::uint64_t s) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      const State x = build_initial(g, spec, UniformRandom{derive_seed(s, {attempt})});
      if (potential(x, spec).total > 0) return x;
    }
  };
  const auto r = excess_walk_experiment(g, spec, start, kDefaultAlpha, MigrationRule::analysis, 1000, 50, seed);
  std::ostringstream os;
  os << "mean " << r.mean_total << " <= bound " << r.bound;
  detail = os.str();
  return r.mean_total <= r.bound;
}

// 10^5 one-round samples against the enumerated Phi distribution; `worst`
// collects the largest |frequency - p| in standard errors.
bool monte_carlo_matches(const State& s, const Graph& g, const ThresholdSpec& spec, MigrationRule rule,
                         const oracle::ExactRoundDistribution& dist, std::uint64_t seed, double& worst,
                         std::size_t& outcomes) {
  constexpr std::uint64_t trials = 100'000;
  ProtocolConfig cfg;
  cfg.mode = Mode::user_controlled;
  cfg.migration_rule = rule;
  std::map<std::int64_t, std::uint64_t> counts;
  Rng rng(seed);
  for (std::uint64_t t = 0; t < trials; ++t) ++counts[user_round(s, g, spec, cfg, rng).stats.potential_after];
  for (const auto& [phi, c] : counts)
    if (c > 0 && !dist.potential.count(phi)) return false;
  for (const auto& [phi, prob] : dist.potential) {
    const double pe = prob.convert_to<double>();
    const double freq = static_cast<double>(counts[phi]) / static_cast<double>(trials);
    const double se = std::sqrt(pe * (1.0 - pe) / static_cast<double>(trials));
    worst = std::max(worst, se > 0 ? std::abs(freq - pe) / se : (freq == pe ? 0.0 : INFINITY));
  }
  outcomes += dist.potential.size();
  return true;
}

bool suite_exact_oracle(std::uint64_t seed, std::string& detail) {
  using oracle::Rational;
  const Graph g = gen(GeneratorKind::path, {3});
  const auto spec = ThresholdSpec::user_independent(4, {1, 1, 1});
  const State s = State::from_assignment({0, 0, 0, 0}, 3);
  const auto dist = oracle::exact_user_round(s, g, spec, kDefaultAlpha, MigrationRule::stated);

  Rational total = 0;
  for (const auto& [_, p] : dist.potential) total += p;
  if (total != 1) return detail = "exact probabilities do not sum to 1", false;

  // Departures from node 0 follow Binomial(4, p) with the protocol's p.
  const Rational p = oracle::exact(migration_probability(4, 1, kDefaultAlpha, MigrationRule::stated));
  const Rational q = 1 - p;
  for (int d = 0; d <= 4; ++d) {
    static const int binom[] = {1, 4, 6, 4, 1};
    Rational expect = binom[d];
    for (int i = 0; i < d; ++i) expect *= p;
    for (int i = d; i < 4; ++i) expect *= q;
    const auto it = dist.departures[0].find(d);
    const Rational got = it == dist.departures[0].end() ? Rational(0) : it->second;
    if (got != expect) return detail = "departure marginal is not binomial", false;
  }

  // Balanced state: point mass at Phi = 0.
  const State calm = State::from_assignment({0, 1, 2}, 3);
  const auto calm_dist = oracle::exact_user_round(calm, g, ThresholdSpec::user_independent(3, {1, 1, 1}), kDefaultAlpha,
                                                  MigrationRule::stated);
  if (calm_dist.potential.size() != 1 || calm_dist.potential.begin()->first != 0)
    return detail = "balanced state is not a point mass", false;

  // The spec instance, then a middle-node start with the analysis rule.
  const State mid = State::from_assignment({1, 1, 1, 1, 1, 0}, 3);
  const auto spec6 = ThresholdSpec::user_independent(6, {1, 2, 1});
  const auto mid_dist = oracle::exact_user_round(mid, g, spec6, kDefaultAlpha, MigrationRule::analysis);
  double worst = 0.0;
  std::size_t outcomes = 0;
  if (!monte_carlo_matches(s, g, spec, MigrationRule::stated, dist, seed, worst, outcomes) ||
      !monte_carlo_matches(mid, g, spec6, MigrationRule::analysis, mid_dist, seed + 1, worst, outcomes))
    return detail = "Monte Carlo produced an impossible outcome", false;
  std::ostringstream os;
  os << outcomes << " outcomes over two instances, worst deviation " << worst << " standard errors";
  detail = os.str();
  return worst <= 3.0;
}

bool suite_determinism(std::uint64_t seed, std::string& detail) {
  const Graph g = gen(GeneratorKind::erdos_renyi_connected, {12, 300}, seed);
  const auto spec = ThresholdSpec::above_average(200, 12, 0.25);
  const State s0 = build_initial(g, spec, AllOnOne{0});
  for (auto mode : {Mode::resource_controlled, Mode::user_controlled}) {
    ProtocolConfig cfg;
    cfg.mode = mode;
    RunOptions opt;
    opt.max_rounds = 2000;
    const auto a = run(s0, g, spec, cfg, opt, seed), b = run(s0, g, spec, cfg, opt, seed);
    if (a.rounds != b.rounds || !(a.final_state == b.final_state) || a.rows.size() != b.rows.size())
      return detail = "identical seeds gave different runs", false;
    for (std::size_t i = 0; i < a.rows.size(); ++i)
      if (a.rows[i].potential != b.rows[i].potential || a.rows[i].migrations != b.rows[i].migrations)
        return detail = "identical seeds gave different traces", false;
  }
  detail = "runs and generators reproducible";
  return true;
}

bool same_points(const CampaignResult& a, const CampaignResult& b) {
  if (a.points.size() != b.points.size() || a.runs.size() != b.runs.size()) return false;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const auto &p = a.points[i], &q = b.points[i];
    if (p.runs != q.runs || p.convergence_rate != q.convergence_rate || p.median_rounds != q.median_rounds ||
        p.mean_rounds != q.mean_rounds || p.max_rounds != q.max_rounds || p.mean_excess_walks != q.mean_excess_walks)
      return false;
  }
  for (std::size_t i = 0; i < a.runs.size(); ++i)
    if (a.runs[i].seed != b.runs[i].seed || a.runs[i].rounds != b.runs[i].rounds) return false;
  return true;
}

bool suite_campaign(std::uint64_t seed, std::string& detail) {
  Campaign c;
  c.base.graph = GeneratedGraph{GeneratorKind::cycle, {8}, 0};
  c.base.thresholds = AboveAverageThresholds{0.25};
  c.base.initial = UniformRandom{};
  c.variable = SweepVariable::m;
  c.values = {16, 64, 256, 1024};
  c.seeds = 5;
  c.master_seed = seed;
  // 50 H(G) ln m at the largest point, H = 16 on the 8-cycle.
  c.base.options.max_rounds = static_cast<std::uint64_t>(std::ceil(50.0 * 16.0 * std::log(1024.0)));
  const auto r = run_campaign(c);
  for (const auto& p : r.points) {
    if (p.convergence_rate < 0.0 || p.convergence_rate > 1.0) return detail = "convergence rate outside [0,1]", false;
    if (p.convergence_rate != 1.0) return detail = "a run did not converge within 50 H ln m", false;
  }
  CampaignResult again = r;
  for (auto& p : again.points) p = PointStats{p.value, p.n, p.m, p.max_hitting, p.mix_time, p.ln_m, p.n2_over_k};
  aggregate(again);
  if (!same_points(r, again)) return detail = "point statistics not recomputable from run summaries", false;
  if (!same_points(r, run_campaign(c))) return detail = "campaign not reproducible", false;

  Campaign calm = c;
  calm.base.thresholds = UniformThresholds{1024};
  calm.base.initial = AllOnOne{3};
  for (const auto& p : run_campaign(calm).points)
    if (p.max_rounds != 0) return detail = "pre-balanced campaign took rounds", false;
  detail = "convergence rate 1 at every point, aggregation and reruns consistent";
  return true;
}

struct Entry {
  std::string_view name;
  Suite fn;
};

constexpr Entry kSuites[] = {
    {"graph_invariants", suite_graph},
    {"stationary_distribution", suite_stationary},
    {"spectrum_ordering", suite_spectrum},
    {"mixing_lemma", suite_mixing_lemma},
    {"hitting_oracles", suite_hitting},
    {"potential_and_holes", suite_potential},
    {"conservation_and_locality", suite_conservation},
    {"monotonicity", suite_monotonicity},
    {"excess_walk_bound", suite_excess_walks},
    {"exact_oracle", suite_exact_oracle},
    {"determinism", suite_determinism},
    {"campaign_convergence", suite_campaign},
};

}  // namespace

std::vector<std::string_view> verify_suite_names() {
  std::vector<std::string_view> out;
  for (const auto& e : kSuites) out.push_back(e.name);
  return out;
}

std::vector<SuiteReport> run_verify(std::uint64_t seed, const std::function<void(const SuiteReport&)>& on_result) {
  std::vector<SuiteReport> reports;
  std::uint64_t index = 0;
  for (const auto& e : kSuites) {
    SuiteReport rep;
    rep.name = std::string(e.name);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      rep.pass = e.fn(derive_seed(seed, {index}), rep.detail);
    } catch (const std::exception& ex) {
      rep.pass = false;
      rep.detail = std::string("exception: ") + ex.what();
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_result) on_result(rep);
    reports.push_back(std::move(rep));
    ++index;
  }
  return reports;
}

}  // namespace tlb
