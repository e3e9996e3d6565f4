#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "tlb/graph.hpp"
#include "tlb/rng.hpp"
#include "tlb/threshold_model.hpp"

namespace tlb {

enum class Mode { resource_controlled, user_controlled };
// stated: p_v = min(1, alpha * Phi_v / T_v); analysis: p_v = alpha * Phi_v / x_v.
enum class MigrationRule { stated, analysis };

Mode parse_mode(std::string_view name);
std::string_view to_string(Mode mode);
MigrationRule parse_migration_rule(std::string_view name);
std::string_view to_string(MigrationRule rule);

// One-time additive threshold lift. Unset fields are derived in run():
// trigger = ceil(H(G) * gamma * ln n), increment = floor(Phi(x0) * n^-gamma).
struct LiftConfig {
  double gamma = 1.0;
  std::optional<std::uint64_t> trigger_round;
  std::optional<std::int64_t> increment;
};

inline constexpr double kDefaultAlpha = 0.18393972058572117;  // 1/(2e)

struct ProtocolConfig {
  Mode mode = Mode::resource_controlled;
  double alpha = kDefaultAlpha;
  MigrationRule migration_rule = MigrationRule::stated;
  std::optional<LiftConfig> lift;

  // Throws on alpha outside (0,1), gamma < 1, or user-controlled mode with
  // thresholds that are not user-independent.
  void validate(const ThresholdSpec& spec) const;
};

struct RoundStats {
  std::int64_t migrations = 0;
  std::vector<std::int64_t> departures;  // per resource
  std::int64_t excess_walks = 0;         // sum_v max{0, departures_v - Phi_v}
  std::int64_t potential_before = 0;
  std::int64_t potential_after = 0;
  std::size_t clamped_resources = 0;     // resources where alpha*Phi/T exceeded 1
};

struct RoundResult {
  State state;
  RoundStats stats;
};

// Departure decisions read the pre-round state; all arrivals land after all
// departures. Random draws are consumed in ascending user id order: one
// neighbor index per evacuee (resource mode), or one coin per user with
// 0 < p_v < 1 followed by a neighbor index if it moves (user mode).
RoundResult resource_round(const State& s, const Graph& g, const ThresholdSpec& spec, Rng& rng);
RoundResult user_round(const State& s, const Graph& g, const ThresholdSpec& spec, const ProtocolConfig& cfg, Rng& rng);

// Per-user migration probability on a resource with load x and threshold t.
double migration_probability(std::int64_t load, std::int64_t threshold, double alpha, MigrationRule rule,
                             bool* clamped = nullptr);

std::int64_t lift_increment(std::int64_t phi0, std::size_t n, double gamma);
std::uint64_t lift_trigger_round(double max_hitting, double gamma, std::size_t n);
ThresholdSpec apply_lift(const ThresholdSpec& spec, std::int64_t phi0, double gamma);

struct TraceRow {
  std::uint64_t round = 0;
  std::int64_t potential = 0;
  std::int64_t max_load = 0;
  std::int64_t migrations = 0;
  std::int64_t excess_walks = 0;
};

struct LiftRecord {
  std::uint64_t trigger_round = 0;
  std::int64_t phi0 = 0;
  std::int64_t increment = 0;
  bool applied = false;
  // max_v Phi_v when the trigger round was reached (or when the run ended first).
  std::int64_t max_resource_potential = 0;
  std::uint64_t rounds_after = 0;
};

struct RunOptions {
  std::uint64_t max_rounds = 100000;
  // When set, the run stops once Phi <= stop_potential instead of at balance.
  std::optional<std::int64_t> stop_potential;
};

struct RunTrace {
  std::vector<TraceRow> rows;  // rows[0] is the starting state
  bool converged = false;
  std::uint64_t rounds = 0;
  std::int64_t initial_potential = 0;
  std::int64_t final_potential = 0;
  std::int64_t total_excess_walks = 0;
  std::uint64_t seed = 0;
  std::optional<LiftRecord> lift;
  State final_state;
};

// Iterates the configured round function until the stop condition or
// max_rounds. `max_hitting` is only needed for a lift without an explicit
// trigger; it is computed from `g` when absent.
RunTrace run(const State& s0, const Graph& g, const ThresholdSpec& spec, const ProtocolConfig& cfg,
             const RunOptions& options, std::uint64_t seed, std::optional<double> max_hitting = std::nullopt);

enum class TokenSemantics {
  designated_user,  // the token is the lowest-ranked user on the resource
  carried_token,    // each mover carries one of the Phi_v tokens chosen uniformly
};

struct TokenMoveEstimate {
  NodeId resource = 0;
  double probability = 0.0;
  std::uint64_t trials = 0;
};

// Monte Carlo over `trials` independent user-controlled rounds from `s`, one
// entry per overloaded resource.
std::vector<TokenMoveEstimate> token_move_probability_estimate(const Graph& g, const State& s,
                                                               const ThresholdSpec& spec, const ProtocolConfig& cfg,
                                                               std::uint64_t trials, std::uint64_t seed,
                                                               TokenSemantics semantics = TokenSemantics::designated_user);

}  // namespace tlb
