#include "tlb/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "tlb/error.hpp"
#include "tlb/rng.hpp"
#include "tlb/spectral.hpp"

namespace tlb {

namespace {

constexpr std::uint64_t kStartStream = 0x5747;

double ln(double x) { return std::log(x); }

bool needs_hitting(const SimulationConfig& cfg) {
  return cfg.stop_potential_factor.has_value() || (cfg.protocol.lift && !cfg.protocol.lift->trigger_round);
}

RunOptions options_for(const SimulationConfig& cfg, const PreparedRun& p) {
  RunOptions opt = cfg.options;
  if (cfg.stop_potential_factor)
    opt.stop_potential = static_cast<std::int64_t>(
        std::floor(*cfg.stop_potential_factor * static_cast<double>(p.graph.node_count()) * p.max_hitting + 1e-9));
  return opt;
}

RunTrace run_prepared(const SimulationConfig& cfg, const PreparedRun& p, const State& start, std::uint64_t seed) {
  return run(start, p.graph, p.spec, cfg.protocol, options_for(cfg, p), seed,
             needs_hitting(cfg) ? std::optional<double>(p.max_hitting) : std::nullopt);
}

std::int64_t max_of(const std::vector<std::int64_t>& v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

Graph build_graph(const GraphRecipe& recipe) {
  if (const auto* gen = std::get_if<GeneratedGraph>(&recipe)) return generate(gen->kind, gen->params, gen->seed);
  return load_edge_list(std::get<GraphFile>(recipe).path);
}

ThresholdSpec build_thresholds(const ThresholdRecipe& recipe, std::size_t m, std::size_t n) {
  if (const auto* aa = std::get_if<AboveAverageThresholds>(&recipe)) return ThresholdSpec::above_average(m, n, aa->eps);
  if (const auto* uni = std::get_if<UniformThresholds>(&recipe))
    return ThresholdSpec::user_independent(m, std::vector<std::int64_t>(n, uni->value));
  const auto& spec = std::get<ExplicitThresholds>(recipe).spec;
  require(spec.resources() == n, "thresholds: spec has " + std::to_string(spec.resources()) +
                                     " resources but the graph has " + std::to_string(n) + " nodes");
  return spec;
}

State build_start(const InitialRecipe& recipe, const Graph& g, const ThresholdSpec& spec, std::uint64_t run_seed) {
  if (const auto* one = std::get_if<AllOnOne>(&recipe)) return build_initial(g, spec, *one);
  if (std::holds_alternative<UniformRandom>(recipe))
    return build_initial(g, spec, UniformRandom{derive_seed(run_seed, {kStartStream})});
  if (const auto* adv = std::get_if<TwoCliqueAdversarial>(&recipe)) return build_initial(g, spec, *adv);
  const State& s = std::get<ExplicitState>(recipe).state;
  s.validate();
  require(s.resources() == g.node_count() && s.users() == spec.users(),
          "initial state: dimensions do not match graph and thresholds");
  return s;
}

PreparedRun prepare(const SimulationConfig& cfg, std::uint64_t seed) {
  Graph g = build_graph(cfg.graph);
  const std::size_t m = std::holds_alternative<ExplicitThresholds>(cfg.thresholds)
                            ? std::get<ExplicitThresholds>(cfg.thresholds).spec.users()
                            : cfg.m;
  require(m >= 1, "simulation: m must be >= 1");
  ThresholdSpec spec = build_thresholds(cfg.thresholds, m, g.node_count());
  State start = build_start(cfg.initial, g, spec, seed);
  PreparedRun p{std::move(g), std::move(spec), std::move(start), 0.0};
  if (needs_hitting(cfg)) p.max_hitting = max_entry(hitting_times(p.graph));
  return p;
}

RunTrace simulate(const SimulationConfig& cfg, std::uint64_t seed) {
  const PreparedRun p = prepare(cfg, seed);
  return run_prepared(cfg, p, p.start, seed);
}

SweepVariable parse_sweep_variable(std::string_view name) {
  if (name == "m") return SweepVariable::m;
  if (name == "k") return SweepVariable::k;
  if (name == "alpha") return SweepVariable::alpha;
  if (name == "gamma") return SweepVariable::gamma;
  fail(ErrorCode::invalid_argument, "unknown sweep variable '" + std::string(name) + "'");
}

std::string_view to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::m: return "m";
    case SweepVariable::k: return "k";
    case SweepVariable::alpha: return "alpha";
    case SweepVariable::gamma: return "gamma";
  }
  return "?";
}

double median(std::vector<double> values) {
  require(!values.empty(), "median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "spearman: need two samples of equal length >= 2");
  const auto rx = average_ranks(x), ry = average_ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, std::max<std::size_t>(1, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

void aggregate(CampaignResult& result) {
  std::sort(result.runs.begin(), result.runs.end(), [](const RunSummary& a, const RunSummary& b) {
    return std::tie(a.point, a.seed_index) < std::tie(b.point, b.seed_index);
  });
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    PointStats& p = result.points[i];
    std::vector<double> rounds;
    double excess = 0.0;
    std::size_t converged = 0;
    p.max_rounds = 0;
    for (const auto& r : result.runs) {
      if (r.point != i) continue;
      rounds.push_back(static_cast<double>(r.rounds));
      excess += static_cast<double>(r.excess_walks);
      converged += r.converged ? 1 : 0;
      p.max_rounds = std::max(p.max_rounds, r.rounds);
    }
    p.runs = rounds.size();
    if (rounds.empty()) continue;
    const auto count = static_cast<double>(rounds.size());
    p.convergence_rate = static_cast<double>(converged) / count;
    p.mean_rounds = std::accumulate(rounds.begin(), rounds.end(), 0.0) / count;
    p.median_rounds = median(rounds);
    p.mean_excess_walks = excess / count;
    p.ratio_hitting = p.median_rounds / (p.max_hitting * p.ln_m);
    p.ratio_mixing = p.median_rounds / (static_cast<double>(p.mix_time) * p.ln_m);
  }
}

CampaignResult run_campaign(const Campaign& campaign) {
  require(!campaign.values.empty(), "campaign: sweep needs at least one point");
  require(campaign.seeds >= 1, "campaign: seeds must be >= 1");

  struct Point {
    SimulationConfig cfg;
    PreparedRun prepared;
  };
  std::vector<Point> points;
  CampaignResult result;
  result.variable = campaign.variable;

  for (std::size_t i = 0; i < campaign.values.size(); ++i) {
    const double value = campaign.values[i];
    SimulationConfig cfg = campaign.base;
    switch (campaign.variable) {
      case SweepVariable::m:
        require(value >= 1 && value == std::floor(value), "campaign: m values must be positive integers");
        require(!std::holds_alternative<ExplicitThresholds>(cfg.thresholds),
                "campaign: cannot sweep m with an explicit threshold table");
        cfg.m = static_cast<std::size_t>(value);
        break;
      case SweepVariable::k: {
        auto* gen = std::get_if<GeneratedGraph>(&cfg.graph);
        require(gen && gen->kind == GeneratorKind::two_clique && gen->params.size() == 2,
                "campaign: sweeping k requires a two_clique graph");
        gen->params[1] = static_cast<std::int64_t>(value);
        break;
      }
      case SweepVariable::alpha:
        cfg.protocol.alpha = value;
        break;
      case SweepVariable::gamma:
        if (!cfg.protocol.lift) cfg.protocol.lift = LiftConfig{};
        cfg.protocol.lift->gamma = value;
        break;
    }
    PreparedRun prepared = prepare(cfg, campaign.master_seed);
    if (check_feasible(prepared.spec) == Feasibility::infeasible)
      fail(ErrorCode::infeasible, "campaign: infeasible thresholds at " + std::string(to_string(campaign.variable)) +
                                      "=" + std::to_string(value));
    cfg.protocol.validate(prepared.spec);

    if (!needs_hitting(cfg)) prepared.max_hitting = max_entry(hitting_times(prepared.graph));
    const double analysis_h = prepared.max_hitting;
    PointStats stats;
    stats.value = value;
    stats.n = prepared.graph.node_count();
    stats.m = prepared.spec.users();
    stats.max_hitting = analysis_h;
    stats.mix_time = mixing_time(prepared.graph);
    stats.ln_m = ln(static_cast<double>(stats.m));
    if (const auto k = two_clique_cross_edges(prepared.graph))
      stats.n2_over_k = static_cast<double>(stats.n * stats.n) / static_cast<double>(*k);
    result.points.push_back(stats);
    points.push_back({std::move(cfg), std::move(prepared)});
  }

  const std::size_t total = points.size() * campaign.seeds;
  result.runs.resize(total);
  parallel_for(total, [&](std::size_t job) {
    const std::size_t pi = job / campaign.seeds, si = job % campaign.seeds;
    const Point& pt = points[pi];
    const std::uint64_t seed = derive_seed(campaign.master_seed, {pi, si});
    const State start = build_start(pt.cfg.initial, pt.prepared.graph, pt.prepared.spec, seed);
    const auto trace = run_prepared(pt.cfg, pt.prepared, start, seed);
    result.runs[job] = RunSummary{pi,
                                  si,
                                  seed,
                                  trace.converged,
                                  trace.rounds,
                                  trace.initial_potential,
                                  trace.final_potential,
                                  trace.total_excess_walks,
                                  trace.lift};
  });
  aggregate(result);
  return result;
}

CampaignResult sweep_convergence_vs_m(const Campaign& campaign) {
  require(campaign.variable == SweepVariable::m, "sweep_convergence_vs_m: sweep variable must be m");
  return run_campaign(campaign);
}

LowerBoundResult lower_bound_experiment(std::size_t n, double eps, const std::vector<std::int64_t>& k_list,
                                        std::size_t m, std::size_t seeds, std::uint64_t master_seed,
                                        std::uint64_t max_rounds) {
  require(k_list.size() >= 2, "lower bound: need at least two k values");
  Campaign c;
  c.base.graph = GeneratedGraph{GeneratorKind::two_clique, {static_cast<std::int64_t>(n), k_list.front()}, 0};
  c.base.thresholds = AboveAverageThresholds{eps};
  c.base.initial = TwoCliqueAdversarial{eps};
  c.base.protocol.mode = Mode::resource_controlled;
  c.base.m = m;
  c.base.options.max_rounds = max_rounds;
  c.variable = SweepVariable::k;
  for (auto k : k_list) c.values.push_back(static_cast<double>(k));
  c.seeds = seeds;
  c.master_seed = master_seed;
  LowerBoundResult r;
  r.campaign = run_campaign(c);
  std::vector<double> med, scale;
  for (const auto& p : r.campaign.points) {
    med.push_back(p.median_rounds);
    scale.push_back(p.n2_over_k.value_or(0.0));
  }
  r.rank_correlation = spearman(med, scale);
  return r;
}

std::uint64_t balls_bins_walk_count(const Graph& g) {
  const auto stats = degree_stats(g);
  const double k = 192.0 * (2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(stats.min_degree)) *
                   ln(static_cast<double>(g.node_count()));
  return static_cast<std::uint64_t>(std::ceil(k));
}

BallsBinsResult balls_bins_check(const Graph& g, std::size_t trials, std::uint64_t seed, NodeId start,
                                 std::optional<std::uint64_t> walks) {
  require(start < g.node_count(), "balls_bins: start node out of range");
  require(trials >= 1, "balls_bins: trials must be >= 1");
  BallsBinsResult r;
  r.walks = walks.value_or(balls_bins_walk_count(g));
  require(r.walks >= 1, "balls_bins: at least one walk is required");
  r.t = mixing_time(g);
  r.trials = trials;
  const std::uint64_t four_e = 4 * g.edge_count();
  for (NodeId v = 0; v < g.node_count(); ++v)
    r.floor.push_back(static_cast<std::int64_t>((g.degree(v) * r.walks + four_e - 1) / four_e));

  Rng rng(seed);
  std::vector<std::int64_t> visits(g.node_count());
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::fill(visits.begin(), visits.end(), 0);
    for (std::uint64_t w = 0; w < r.walks; ++w) {
      NodeId at = start;
      for (std::uint64_t s = 0; s < r.t; ++s) {
        const auto nb = g.neighbors(at);
        at = nb[rng.below(nb.size())];
      }
      ++visits[at];
      const auto nb = g.neighbors(at);
      ++visits[nb[rng.below(nb.size())]];
    }
    bool ok = true;
    for (NodeId v = 0; v < g.node_count(); ++v) ok = ok && visits[v] >= r.floor[v];
    r.passed += ok ? 1 : 0;
  }
  r.pass_rate = static_cast<double>(r.passed) / static_cast<double>(trials);
  return r;
}

double spread_lambda(std::int64_t phi0, std::size_t n) {
  const double nn = static_cast<double>(n), l = ln(nn);
  const double avg = static_cast<double>(phi0) / nn * (1.0 + 1.0 / (nn * nn));
  return 8.0 * std::max(std::sqrt(2.0 * avg * l), 4.0 * l);
}

double spread_bound(std::int64_t phi0, std::size_t n, double alpha, std::uint64_t mix) {
  const double nn = static_cast<double>(n), l = ln(nn), t = static_cast<double>(mix);
  return static_cast<double>(phi0) / nn * (1.0 + 1.0 / (nn * nn)) + spread_lambda(phi0, n) +
         294.0 / (1.0 - alpha) * l * l * t * t;
}

SpreadResult spread_check(const Graph& g, const ThresholdSpec& spec, const State& s0, double alpha,
                          std::size_t seeds, std::uint64_t master_seed) {
  require(g.is_regular(), "spread_check: graph must be regular");
  require(!is_bipartite(g).bipartite, "spread_check: graph must be non-bipartite");
  require(seeds >= 1, "spread_check: seeds must be >= 1");
  ProtocolConfig cfg;
  cfg.mode = Mode::user_controlled;
  cfg.alpha = alpha;
  cfg.validate(spec);

  SpreadResult r;
  r.t = mixing_time(g);
  const std::int64_t phi0 = potential(s0, spec).total;
  r.lambda = spread_lambda(phi0, g.node_count());
  r.bound = spread_bound(phi0, g.node_count(), alpha, r.t);
  r.max_resource_potential.resize(seeds);
  std::vector<std::size_t> violations(seeds, 0);
  parallel_for(seeds, [&](std::size_t i) {
    RunOptions opt;
    opt.max_rounds = r.t;
    const auto trace = run(s0, g, spec, cfg, opt, derive_seed(master_seed, {i}));
    const auto phi = potential(trace.final_state, spec);
    r.max_resource_potential[i] = max_of(phi.per_resource);
    for (auto p : phi.per_resource) violations[i] += static_cast<double>(p) > r.bound ? 1 : 0;
  });
  r.violations = std::accumulate(violations.begin(), violations.end(), std::size_t{0});
  r.pairs = seeds * g.node_count();
  return r;
}

LiftResult lift_experiment(const Graph& g, const ThresholdSpec& spec, const State& s0, double gamma,
                           std::size_t seeds, std::uint64_t master_seed, std::uint64_t max_rounds) {
  require(spec.kind() == ThresholdKind::user_independent || spec.is_above_average(),
          "lift_experiment: thresholds must be user-independent or above average");
  require(seeds >= 1, "lift_experiment: seeds must be >= 1");
  ProtocolConfig cfg;
  cfg.mode = Mode::resource_controlled;
  cfg.lift = LiftConfig{gamma, std::nullopt, std::nullopt};
  LiftResult r;
  r.max_hitting = max_entry(hitting_times(g));
  const std::int64_t phi0 = potential(s0, spec).total;
  r.trigger_round = lift_trigger_round(r.max_hitting, gamma, g.node_count());
  r.increment = lift_increment(phi0, g.node_count(), gamma);
  r.bound = 10.0 * static_cast<double>(phi0) * std::pow(static_cast<double>(g.node_count()), -gamma);
  r.runs.resize(seeds);
  RunOptions opt;
  opt.max_rounds = max_rounds;
  parallel_for(seeds, [&](std::size_t i) {
    r.runs[i] = run(s0, g, spec, cfg, opt, derive_seed(master_seed, {i}), r.max_hitting);
  });
  std::size_t within = 0;
  std::vector<double> after;
  r.all_converged = true;
  for (const auto& t : r.runs) {
    within += static_cast<double>(t.lift->max_resource_potential) <= r.bound ? 1 : 0;
    r.all_converged = r.all_converged && t.converged;
    after.push_back(static_cast<double>(t.lift->rounds_after));
  }
  r.fraction_within_bound = static_cast<double>(within) / static_cast<double>(seeds);
  r.median_rounds_after_lift = median(after);
  return r;
}

ExcessWalkResult excess_walk_experiment(const Graph& g, const ThresholdSpec& spec,
                                        const std::function<State(std::uint64_t)>& start_for_seed, double alpha,
                                        MigrationRule rule, std::uint64_t rounds, std::size_t seeds,
                                        std::uint64_t master_seed) {
  require(seeds >= 1, "excess walks: seeds must be >= 1");
  ProtocolConfig cfg;
  cfg.mode = Mode::user_controlled;
  cfg.alpha = alpha;
  cfg.migration_rule = rule;
  ExcessWalkResult r;
  r.bound = 30.0 * alpha * alpha * static_cast<double>(rounds) * static_cast<double>(g.node_count());
  r.totals.resize(seeds);
  RunOptions opt;
  opt.max_rounds = rounds;
  // Starts are built sequentially so start_for_seed need not be thread-safe.
  std::vector<State> starts;
  for (std::size_t i = 0; i < seeds; ++i) starts.push_back(start_for_seed(derive_seed(master_seed, {i, 0})));
  parallel_for(seeds, [&](std::size_t i) {
    r.totals[i] = run(starts[i], g, spec, cfg, opt, derive_seed(master_seed, {i, 1})).total_excess_walks;
  });
  r.mean_total = static_cast<double>(std::accumulate(r.totals.begin(), r.totals.end(), std::int64_t{0})) /
                 static_cast<double>(seeds);
  return r;
}

PlateauResult plateau_experiment(const Graph& g, const ThresholdSpec& spec, const State& s0, double alpha,
                                 std::size_t seeds, std::uint64_t master_seed, double c, double budget_factor) {
  require(seeds >= 1, "plateau: seeds must be >= 1");
  ProtocolConfig cfg;
  cfg.mode = Mode::user_controlled;
  cfg.alpha = alpha;
  const double h = max_entry(hitting_times(g));
  PlateauResult r;
  // H(G) is often an integer computed with rounding error; the guards keep floor/ceil on the exact side.
  r.target = static_cast<std::int64_t>(std::floor(c * static_cast<double>(g.node_count()) * h + 1e-9));
  r.budget = static_cast<std::uint64_t>(std::ceil(budget_factor * h * ln(static_cast<double>(spec.users())) - 1e-9));
  r.runs = seeds;
  r.rounds.resize(seeds);
  std::vector<char> reached(seeds, 0);
  RunOptions opt;
  opt.max_rounds = r.budget;
  opt.stop_potential = r.target;
  parallel_for(seeds, [&](std::size_t i) {
    const auto t = run(s0, g, spec, cfg, opt, derive_seed(master_seed, {i}));
    reached[i] = t.converged ? 1 : 0;
    r.rounds[i] = t.rounds;
  });
  r.reached = static_cast<std::size_t>(std::count(reached.begin(), reached.end(), 1));
  r.fraction = static_cast<double>(r.reached) / static_cast<double>(seeds);
  return r;
}

}  // namespace tlb
