#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tlb/graph.hpp"
#include "tlb/protocols.hpp"
#include "tlb/threshold_model.hpp"

namespace tlb {

// ---- recipes: how a run's graph, thresholds and start are built ----

struct GeneratedGraph {
  GeneratorKind kind = GeneratorKind::cycle;
  std::vector<std::int64_t> params;
  std::uint64_t seed = 0;
};
struct GraphFile {
  std::string path;
};
using GraphRecipe = std::variant<GeneratedGraph, GraphFile>;

// Uniform user-independent ceil((1+eps) * T-bar), recomputed for every m.
struct AboveAverageThresholds {
  double eps = 0.25;
};
// The same T for every resource, whatever m is.
struct UniformThresholds {
  std::int64_t value = 1;
};
struct ExplicitThresholds {
  ThresholdSpec spec;
};
using ThresholdRecipe = std::variant<AboveAverageThresholds, UniformThresholds, ExplicitThresholds>;

struct ExplicitState {
  State state;
};
// UniformRandom's seed field is ignored here: the run seed is used instead.
using InitialRecipe = std::variant<AllOnOne, UniformRandom, TwoCliqueAdversarial, ExplicitState>;

Graph build_graph(const GraphRecipe& recipe);
ThresholdSpec build_thresholds(const ThresholdRecipe& recipe, std::size_t m, std::size_t n);
State build_start(const InitialRecipe& recipe, const Graph& g, const ThresholdSpec& spec, std::uint64_t run_seed);

struct SimulationConfig {
  GraphRecipe graph;
  ThresholdRecipe thresholds;
  InitialRecipe initial;
  ProtocolConfig protocol;
  std::size_t m = 0;  // ignored with explicit thresholds
  RunOptions options;
  // User-controlled plateau: stop once Phi <= factor * n * H(G).
  std::optional<double> stop_potential_factor;
};

struct PreparedRun {
  Graph graph;
  ThresholdSpec spec;
  State start;
  double max_hitting = 0.0;
};

PreparedRun prepare(const SimulationConfig& cfg, std::uint64_t seed);
RunTrace simulate(const SimulationConfig& cfg, std::uint64_t seed);

// ---- campaigns ----

enum class SweepVariable { m, k, alpha, gamma };
SweepVariable parse_sweep_variable(std::string_view name);
std::string_view to_string(SweepVariable v);

struct Campaign {
  SimulationConfig base;
  SweepVariable variable = SweepVariable::m;
  std::vector<double> values;
  std::size_t seeds = 1;
  std::uint64_t master_seed = 0;
};

struct RunSummary {
  std::size_t point = 0;
  std::size_t seed_index = 0;
  std::uint64_t seed = 0;
  bool converged = false;
  std::uint64_t rounds = 0;
  std::int64_t initial_potential = 0;
  std::int64_t final_potential = 0;
  std::int64_t excess_walks = 0;
  std::optional<LiftRecord> lift;
};

struct PointStats {
  double value = 0.0;  // sweep variable
  std::size_t n = 0;
  std::size_t m = 0;
  double max_hitting = 0.0;
  std::uint64_t mix_time = 0;
  double ln_m = 0.0;
  std::optional<double> n2_over_k;  // two-clique graphs only
  std::size_t runs = 0;
  double convergence_rate = 0.0;
  double median_rounds = 0.0;
  double mean_rounds = 0.0;
  std::uint64_t max_rounds = 0;
  double mean_excess_walks = 0.0;
  double ratio_hitting = 0.0;  // median_rounds / (H(G) ln m)
  double ratio_mixing = 0.0;   // median_rounds / (MIX(G) ln m)
};

struct CampaignResult {
  SweepVariable variable = SweepVariable::m;
  std::vector<PointStats> points;
  std::vector<RunSummary> runs;  // sorted by (point, seed_index)
};

// Aggregates retained run summaries into per-point statistics.
void aggregate(CampaignResult& result);

// Runs every (point, seed) pair, concurrently where hardware allows. Aborts
// with Error(infeasible) naming the first infeasible sweep point.
CampaignResult run_campaign(const Campaign& campaign);
CampaignResult sweep_convergence_vs_m(const Campaign& campaign);

struct LowerBoundResult {
  CampaignResult campaign;
  double rank_correlation = 0.0;  // Spearman, median rounds vs n^2/k
};

LowerBoundResult lower_bound_experiment(std::size_t n, double eps, const std::vector<std::int64_t>& k_list,
                                        std::size_t m, std::size_t seeds, std::uint64_t master_seed,
                                        std::uint64_t max_rounds = 1'000'000);

// ---- desk-scale checks of individual bounds ----

struct BallsBinsResult {
  std::uint64_t walks = 0;
  std::uint64_t t = 0;                    // MIX(G); visits are counted at t and t+1
  std::vector<std::int64_t> floor;        // ceil(pi(v) * walks / 2)
  std::size_t trials = 0;
  std::size_t passed = 0;
  double pass_rate = 0.0;
};

// ceil(192 * (2|E| / delta) * ln n)
std::uint64_t balls_bins_walk_count(const Graph& g);
// All walks start at `start`. `walks` defaults to balls_bins_walk_count(g).
BallsBinsResult balls_bins_check(const Graph& g, std::size_t trials, std::uint64_t seed, NodeId start = 0,
                                 std::optional<std::uint64_t> walks = std::nullopt);

struct SpreadResult {
  std::uint64_t t = 0;
  double bound = 0.0;
  double lambda = 0.0;
  std::size_t violations = 0;  // (seed, node) pairs above the bound
  std::size_t pairs = 0;
  std::vector<std::int64_t> max_resource_potential;  // per seed
};

// lambda = 8 max{sqrt(2 (Phi0/n)(1 + n^-2) ln n), 4 ln n}
double spread_lambda(std::int64_t phi0, std::size_t n);
// Phi0/n (1 + n^-2) + lambda + 294/(1-alpha) ln^2 n MIX^2
double spread_bound(std::int64_t phi0, std::size_t n, double alpha, std::uint64_t mix);

SpreadResult spread_check(const Graph& g, const ThresholdSpec& spec, const State& s0, double alpha,
                          std::size_t seeds, std::uint64_t master_seed);

struct LiftResult {
  std::uint64_t trigger_round = 0;
  std::int64_t increment = 0;
  double bound = 0.0;  // 10 Phi0 / n^gamma
  double fraction_within_bound = 0.0;
  bool all_converged = false;
  double median_rounds_after_lift = 0.0;
  double max_hitting = 0.0;
  std::vector<RunTrace> runs;
};

LiftResult lift_experiment(const Graph& g, const ThresholdSpec& spec, const State& s0, double gamma,
                           std::size_t seeds, std::uint64_t master_seed, std::uint64_t max_rounds = 1'000'000);

struct ExcessWalkResult {
  double mean_total = 0.0;
  double bound = 0.0;  // 30 alpha^2 t n
  std::vector<std::int64_t> totals;
};

// Runs exactly `rounds` user-controlled rounds per seed from the start
// produced by `start_for_seed`.
ExcessWalkResult excess_walk_experiment(const Graph& g, const ThresholdSpec& spec,
                                        const std::function<State(std::uint64_t)>& start_for_seed, double alpha,
                                        MigrationRule rule, std::uint64_t rounds, std::size_t seeds,
                                        std::uint64_t master_seed);

struct PlateauResult {
  std::int64_t target = 0;       // c n H(G)
  std::uint64_t budget = 0;      // ceil(budget_factor H(G) ln m)
  std::size_t reached = 0;
  std::size_t runs = 0;
  double fraction = 0.0;
  std::vector<std::uint64_t> rounds;
};

PlateauResult plateau_experiment(const Graph& g, const ThresholdSpec& spec, const State& s0, double alpha,
                                 std::size_t seeds, std::uint64_t master_seed, double c = 16.0,
                                 double budget_factor = 20.0);

// ---- statistics helpers ----

double median(std::vector<double> values);
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Calls fn(i) for i in [0, count) on a small thread pool.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace tlb
