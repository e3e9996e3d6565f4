#include "tlb/protocols.hpp"

#include <algorithm>
#include <cmath>

#include "tlb/error.hpp"
#include "tlb/spectral.hpp"

namespace tlb {

namespace {

NodeId random_neighbor(const Graph& g, NodeId v, Rng& rng) {
  const auto nb = g.neighbors(v);
  return nb[rng.below(nb.size())];
}

void finish_round(RoundResult& r, const State& s, const ThresholdSpec& spec,
                  const std::vector<std::int64_t>& phi_before) {
  for (NodeId v = 0; v < s.resources(); ++v)
    r.stats.excess_walks += std::max<std::int64_t>(r.stats.departures[v] - phi_before[v], 0);
  r.stats.potential_after = potential(r.state, spec).total;
}

}  // namespace

Mode parse_mode(std::string_view name) {
  if (name == "resource_controlled") return Mode::resource_controlled;
  if (name == "user_controlled") return Mode::user_controlled;
  fail(ErrorCode::invalid_argument, "unknown protocol mode '" + std::string(name) + "'");
}

std::string_view to_string(Mode mode) {
  return mode == Mode::resource_controlled ? "resource_controlled" : "user_controlled";
}

MigrationRule parse_migration_rule(std::string_view name) {
  if (name == "stated") return MigrationRule::stated;
  if (name == "analysis") return MigrationRule::analysis;
  fail(ErrorCode::invalid_argument, "unknown migration rule '" + std::string(name) + "'");
}

std::string_view to_string(MigrationRule rule) { return rule == MigrationRule::stated ? "stated" : "analysis"; }

void ProtocolConfig::validate(const ThresholdSpec& spec) const {
  require(alpha > 0.0 && alpha < 1.0, "protocol: alpha must lie in (0, 1)");
  if (lift) require(lift->gamma >= 1.0, "protocol: lift gamma must be >= 1");
  if (mode == Mode::user_controlled)
    require(spec.kind() == ThresholdKind::user_independent,
            "protocol: user-controlled migration requires user-independent thresholds");
}

RoundResult resource_round(const State& s, const Graph& g, const ThresholdSpec& spec, Rng& rng) {
  const std::size_t n = s.resources();
  const Occupancy occ(s);
  RoundResult r{s, {}};
  r.stats.departures.assign(n, 0);
  std::vector<std::int64_t> phi(n, 0);
  std::vector<UserId> evacuees;
  for (NodeId v = 0; v < n; ++v) {
    const auto here = occ.on(v);
    if (here.empty()) continue;
    if (spec.kind() == ThresholdKind::user_independent) {
      const auto keep = static_cast<std::size_t>(std::min<std::int64_t>(s.load[v], spec.at(0, v)));
      evacuees.insert(evacuees.end(), here.begin() + static_cast<std::ptrdiff_t>(keep), here.end());
      phi[v] = s.load[v] - static_cast<std::int64_t>(keep);
    } else {
      const auto ranked = ranked_occupants(here, spec, v);
      const auto keep = satisfied_prefix(ranked, spec, v);
      evacuees.insert(evacuees.end(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end());
      phi[v] = s.load[v] - static_cast<std::int64_t>(keep);
    }
    r.stats.potential_before += phi[v];
  }
  std::sort(evacuees.begin(), evacuees.end());
  for (UserId i : evacuees) {
    const NodeId from = s.assignment[i];
    const NodeId to = random_neighbor(g, from, rng);
    r.state.assignment[i] = to;
    --r.state.load[from];
    ++r.state.load[to];
    ++r.stats.departures[from];
  }
  r.stats.migrations = static_cast<std::int64_t>(evacuees.size());
  finish_round(r, s, spec, phi);
  return r;
}

double migration_probability(std::int64_t load, std::int64_t threshold, double alpha, MigrationRule rule,
                             bool* clamped) {
  if (clamped) *clamped = false;
  const std::int64_t phi = std::max<std::int64_t>(load - threshold, 0);
  if (phi == 0) return 0.0;
  if (rule == MigrationRule::analysis) return alpha * static_cast<double>(phi) / static_cast<double>(load);
  const double p = alpha * static_cast<double>(phi) / static_cast<double>(threshold);
  if (p > 1.0) {
    if (clamped) *clamped = true;
    return 1.0;
  }
  return p;
}

RoundResult user_round(const State& s, const Graph& g, const ThresholdSpec& spec, const ProtocolConfig& cfg,
                       Rng& rng) {
  require(spec.kind() == ThresholdKind::user_independent,
          "user_round: user-controlled migration requires user-independent thresholds");
  const std::size_t n = s.resources();
  RoundResult r{s, {}};
  r.stats.departures.assign(n, 0);
  std::vector<std::int64_t> phi(n, 0);
  std::vector<double> p(n, 0.0);
  for (NodeId v = 0; v < n; ++v) {
    phi[v] = std::max<std::int64_t>(s.load[v] - spec.at(0, v), 0);
    r.stats.potential_before += phi[v];
    bool clamped = false;
    p[v] = migration_probability(s.load[v], spec.at(0, v), cfg.alpha, cfg.migration_rule, &clamped);
    if (clamped) ++r.stats.clamped_resources;
  }
  if (r.stats.potential_before == 0) {
    r.stats.potential_after = 0;
    return r;
  }
  for (UserId i = 0; i < s.users(); ++i) {
    const NodeId from = s.assignment[i];
    if (!rng.bernoulli(p[from])) continue;
    const NodeId to = random_neighbor(g, from, rng);
    r.state.assignment[i] = to;
    --r.state.load[from];
    ++r.state.load[to];
    ++r.stats.departures[from];
    ++r.stats.migrations;
  }
  finish_round(r, s, spec, phi);
  return r;
}

std::int64_t lift_increment(std::int64_t phi0, std::size_t n, double gamma) {
  require(phi0 >= 0, "lift: phi0 must be >= 0");
  const double inc = std::floor(static_cast<double>(phi0) * std::pow(static_cast<double>(n), -gamma) + 1e-9);
  return std::max<std::int64_t>(static_cast<std::int64_t>(inc), 0);
}

std::uint64_t lift_trigger_round(double max_hitting, double gamma, std::size_t n) {
  return static_cast<std::uint64_t>(std::ceil(max_hitting * gamma * std::log(static_cast<double>(n)) - 1e-9));
}

ThresholdSpec apply_lift(const ThresholdSpec& spec, std::int64_t phi0, double gamma) {
  return spec.lifted(lift_increment(phi0, spec.resources(), gamma));
}

RunTrace run(const State& s0, const Graph& g, const ThresholdSpec& base_spec, const ProtocolConfig& cfg,
             const RunOptions& options, std::uint64_t seed, std::optional<double> max_hitting) {
  s0.validate();
  require(s0.resources() == g.node_count(), "run: state and graph disagree on the number of resources");
  require(base_spec.users() == s0.users() && base_spec.resources() == s0.resources(),
          "run: threshold spec does not match the state dimensions");
  cfg.validate(base_spec);
  if (check_feasible(base_spec) == Feasibility::infeasible)
    fail(ErrorCode::infeasible, "run: thresholds are infeasible (no balanced state exists)");

  ThresholdSpec spec = base_spec;
  Rng rng(seed);
  RunTrace trace;
  trace.seed = seed;
  State state = s0;
  auto pot = potential(state, spec);
  trace.initial_potential = pot.total;
  trace.rows.push_back({0, pot.total, state.max_load(), 0, 0});

  if (cfg.lift) {
    LiftRecord rec;
    rec.phi0 = pot.total;
    rec.increment = cfg.lift->increment.value_or(lift_increment(pot.total, g.node_count(), cfg.lift->gamma));
    if (cfg.lift->trigger_round) {
      rec.trigger_round = *cfg.lift->trigger_round;
    } else {
      const double h = max_hitting ? *max_hitting : max_entry(hitting_times(g));
      rec.trigger_round = lift_trigger_round(h, cfg.lift->gamma, g.node_count());
    }
    trace.lift = rec;
  }

  auto done = [&] {
    if (options.stop_potential) return pot.total <= *options.stop_potential;
    return is_balanced(state, spec);
  };

  std::uint64_t round = 0;
  for (;;) {
    if (trace.lift && !trace.lift->applied && round == trace.lift->trigger_round) {
      trace.lift->max_resource_potential = *std::max_element(pot.per_resource.begin(), pot.per_resource.end());
      spec = spec.lifted(trace.lift->increment);
      trace.lift->applied = true;
      pot = potential(state, spec);
    }
    if (done()) {
      trace.converged = true;
      break;
    }
    if (round >= options.max_rounds) break;
    RoundResult r = cfg.mode == Mode::resource_controlled ? resource_round(state, g, spec, rng)
                                                          : user_round(state, g, spec, cfg, rng);
    state = std::move(r.state);
    ++round;
    pot = potential(state, spec);
    trace.total_excess_walks += r.stats.excess_walks;
    trace.rows.push_back({round, pot.total, state.max_load(), r.stats.migrations, r.stats.excess_walks});
  }
  trace.rounds = round;
  trace.final_potential = pot.total;
  if (trace.lift) {
    if (trace.lift->applied) {
      trace.lift->rounds_after = round - trace.lift->trigger_round;
    } else {
      trace.lift->max_resource_potential = *std::max_element(pot.per_resource.begin(), pot.per_resource.end());
    }
  }
  trace.final_state = std::move(state);
  return trace;
}

std::vector<TokenMoveEstimate> token_move_probability_estimate(const Graph& g, const State& s,
                                                               const ThresholdSpec& spec, const ProtocolConfig& cfg,
                                                               std::uint64_t trials, std::uint64_t seed,
                                                               TokenSemantics semantics) {
  require(cfg.mode == Mode::user_controlled, "token estimate: requires user-controlled mode");
  cfg.validate(spec);
  require(trials >= 1, "token estimate: trials must be >= 1");
  const auto phi = potential(s, spec);
  const Occupancy occ(s);
  std::vector<TokenMoveEstimate> out;
  std::vector<UserId> designated;
  for (NodeId v = 0; v < s.resources(); ++v) {
    if (phi.per_resource[v] == 0) continue;
    out.push_back({v, 0.0, trials});
    // Lowest-ranked occupant; with user-independent thresholds that is the highest id.
    designated.push_back(occ.on(v).back());
  }
  require(!out.empty(), "token estimate: no overloaded resource");
  Rng rng(seed);
  std::vector<double> acc(out.size(), 0.0);
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto r = user_round(s, g, spec, cfg, rng);
    for (std::size_t j = 0; j < out.size(); ++j) {
      const NodeId v = out[j].resource;
      if (semantics == TokenSemantics::designated_user) {
        acc[j] += r.state.assignment[designated[j]] != v ? 1.0 : 0.0;
      } else {
        const auto moved = std::min(r.stats.departures[v], phi.per_resource[v]);
        acc[j] += static_cast<double>(moved) / static_cast<double>(phi.per_resource[v]);
      }
    }
  }
  for (std::size_t j = 0; j < out.size(); ++j) out[j].probability = acc[j] / static_cast<double>(trials);
  return out;
}

}  // namespace tlb
