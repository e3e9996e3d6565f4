#include "tlb/threshold_model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tlb/error.hpp"

namespace tlb {

namespace {

std::int64_t ceil_div(std::size_t a, std::size_t b) { return static_cast<std::int64_t>((a + b - 1) / b); }

// Kuhn's augmenting paths: users on the left, resource slots on the right.
class SlotMatcher {
 public:
  SlotMatcher(const ThresholdSpec& spec, const std::vector<std::int64_t>& profile) : spec_(spec), profile_(profile) {
    for (NodeId v = 0; v < profile.size(); ++v)
      for (std::int64_t j = 0; j < profile[v]; ++j) slot_owner_.push_back(v);
    slot_user_.assign(slot_owner_.size(), -1);
  }

  bool perfect() {
    for (UserId i = 0; i < spec_.users(); ++i) {
      visited_.assign(slot_owner_.size(), 0);
      if (!augment(i)) return false;
    }
    return true;
  }

 private:
  bool augment(UserId i) {
    for (std::size_t s = 0; s < slot_owner_.size(); ++s) {
      const NodeId v = slot_owner_[s];
      if (visited_[s] || profile_[v] > spec_.at(i, v)) continue;
      visited_[s] = 1;
      if (slot_user_[s] < 0 || augment(static_cast<UserId>(slot_user_[s]))) {
        slot_user_[s] = static_cast<long>(i);
        return true;
      }
    }
    return false;
  }

  const ThresholdSpec& spec_;
  const std::vector<std::int64_t>& profile_;
  std::vector<NodeId> slot_owner_;
  std::vector<long> slot_user_;
  std::vector<char> visited_;
};

// Tries every load profile (composition of m into n parts).
bool exhaustive_feasible(const ThresholdSpec& spec) {
  const std::size_t n = spec.resources();
  std::vector<std::int64_t> profile(n, 0);
  std::function<bool(std::size_t, std::int64_t)> rec = [&](std::size_t v, std::int64_t left) -> bool {
    if (v + 1 == n) {
      profile[v] = left;
      return SlotMatcher(spec, profile).perfect();
    }
    for (std::int64_t x = 0; x <= left; ++x) {
      profile[v] = x;
      if (rec(v + 1, left - x)) return true;
    }
    return false;
  };
  return rec(0, static_cast<std::int64_t>(spec.users()));
}

}  // namespace

ThresholdKind parse_threshold_kind(std::string_view name) {
  if (name == "user_independent") return ThresholdKind::user_independent;
  if (name == "resource_independent") return ThresholdKind::resource_independent;
  if (name == "arbitrary") return ThresholdKind::arbitrary;
  fail(ErrorCode::invalid_argument, "unknown threshold kind '" + std::string(name) + "'");
}

std::string_view to_string(ThresholdKind kind) {
  switch (kind) {
    case ThresholdKind::user_independent: return "user_independent";
    case ThresholdKind::resource_independent: return "resource_independent";
    case ThresholdKind::arbitrary: return "arbitrary";
  }
  return "?";
}

ThresholdSpec::ThresholdSpec(ThresholdKind kind, std::size_t m, std::size_t n, std::vector<std::int64_t> values)
    : kind_(kind), m_(m), n_(n), values_(std::move(values)) {
  require(m >= 1, "thresholds: need at least one user");
  require(n >= 1, "thresholds: need at least one resource");
  require(!values_.empty(), "thresholds: empty value table");
  for (auto t : values_) require(t >= 1, "thresholds: every threshold must be >= 1 (got " + std::to_string(t) + ")");
  average_ = ceil_div(m, n);
  min_ = *std::min_element(values_.begin(), values_.end());
}

ThresholdSpec ThresholdSpec::user_independent(std::size_t m, std::vector<std::int64_t> per_resource) {
  const std::size_t n = per_resource.size();
  return ThresholdSpec(ThresholdKind::user_independent, m, n, std::move(per_resource));
}

ThresholdSpec ThresholdSpec::resource_independent(std::vector<std::int64_t> per_user, std::size_t n) {
  const std::size_t m = per_user.size();
  return ThresholdSpec(ThresholdKind::resource_independent, m, n, std::move(per_user));
}

ThresholdSpec ThresholdSpec::arbitrary(std::size_t m, std::size_t n, std::vector<std::int64_t> user_major_table) {
  require(user_major_table.size() == m * n, "thresholds: arbitrary table must have m*n entries");
  return ThresholdSpec(ThresholdKind::arbitrary, m, n, std::move(user_major_table));
}

ThresholdSpec ThresholdSpec::above_average(std::size_t m, std::size_t n, double eps) {
  require(eps > 0.0, "thresholds: eps must be positive");
  require(m >= 1 && n >= 1, "thresholds: need m, n >= 1");
  const double avg = static_cast<double>(ceil_div(m, n));
  // Guard against (1+eps)*avg landing a hair above an integer.
  const auto t = static_cast<std::int64_t>(std::ceil((1.0 + eps) * avg - 1e-9));
  auto spec = user_independent(m, std::vector<std::int64_t>(n, std::max<std::int64_t>(t, 1)));
  spec.from_eps_recipe_ = true;
  return spec;
}

std::int64_t ThresholdSpec::uniform_value() const {
  const bool uniform = std::all_of(values_.begin(), values_.end(), [&](auto t) { return t == values_.front(); });
  return uniform ? values_.front() : 0;
}

ThresholdSpec ThresholdSpec::lifted(std::int64_t increment) const {
  require(increment >= 0, "thresholds: lift increment must be >= 0");
  auto values = values_;
  for (auto& t : values) t += increment;
  ThresholdSpec out(kind_, m_, n_, std::move(values));
  out.from_eps_recipe_ = from_eps_recipe_;
  return out;
}

State State::from_assignment(std::vector<NodeId> assignment, std::size_t resources) {
  State s;
  s.load.assign(resources, 0);
  for (NodeId v : assignment) {
    require(v < resources, "state: user assigned to unknown resource " + std::to_string(v));
    ++s.load[v];
  }
  s.assignment = std::move(assignment);
  return s;
}

std::int64_t State::max_load() const { return load.empty() ? 0 : *std::max_element(load.begin(), load.end()); }

void State::validate() const {
  std::vector<std::int64_t> expected(load.size(), 0);
  for (NodeId v : assignment) {
    if (v >= load.size()) fail(ErrorCode::invalid_argument, "state: assignment references unknown resource");
    ++expected[v];
  }
  if (expected != load) fail(ErrorCode::invalid_argument, "state: load profile does not match assignment");
}

Occupancy::Occupancy(const State& s) : offsets(s.resources() + 1, 0), users(s.users()) {
  for (NodeId v : s.assignment) ++offsets[v + 1];
  for (std::size_t v = 0; v < s.resources(); ++v) offsets[v + 1] += offsets[v];
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (UserId i = 0; i < s.users(); ++i) users[cursor[s.assignment[i]]++] = i;
}

std::vector<UserId> ranked_occupants(std::span<const UserId> ascending, const ThresholdSpec& spec, NodeId v) {
  std::vector<UserId> ranked(ascending.begin(), ascending.end());
  if (spec.kind() != ThresholdKind::user_independent) {
    std::stable_sort(ranked.begin(), ranked.end(),
                     [&](UserId a, UserId b) { return spec.at(a, v) > spec.at(b, v); });
  }
  return ranked;
}

std::size_t satisfied_prefix(std::span<const UserId> ranked, const ThresholdSpec& spec, NodeId v) {
  // Thresholds are non-increasing along the ranking, so {p : p <= T} is a prefix.
  std::size_t k = 0;
  while (k < ranked.size() && static_cast<std::int64_t>(k + 1) <= spec.at(ranked[k], v)) ++k;
  return k;
}

Potential potential_by_ranking(const State& s, const ThresholdSpec& spec) {
  Potential p;
  p.per_resource.assign(s.resources(), 0);
  const Occupancy occ(s);
  for (NodeId v = 0; v < s.resources(); ++v) {
    const auto ranked = ranked_occupants(occ.on(v), spec, v);
    p.per_resource[v] = s.load[v] - static_cast<std::int64_t>(satisfied_prefix(ranked, spec, v));
    p.total += p.per_resource[v];
  }
  return p;
}

Potential potential(const State& s, const ThresholdSpec& spec) {
  if (spec.kind() != ThresholdKind::user_independent) return potential_by_ranking(s, spec);
  Potential p;
  p.per_resource.assign(s.resources(), 0);
  for (NodeId v = 0; v < s.resources(); ++v) {
    p.per_resource[v] = std::max<std::int64_t>(s.load[v] - spec.at(0, v), 0);
    p.total += p.per_resource[v];
  }
  return p;
}

bool is_balanced(const State& s, const ThresholdSpec& spec) {
  for (UserId i = 0; i < s.users(); ++i) {
    const NodeId v = s.assignment[i];
    if (s.load[v] > spec.at(i, v)) return false;
  }
  return true;
}

Holes holes(const State& s, const ThresholdSpec& spec) {
  Holes h;
  h.per_resource.assign(s.resources(), 0);
  const bool by_average =
      spec.from_eps_recipe() || (spec.kind() != ThresholdKind::user_independent && spec.is_above_average());
  if (!by_average && spec.kind() != ThresholdKind::user_independent)
    fail(ErrorCode::invalid_argument, "holes: thresholds must be user-independent or above average");
  for (NodeId v = 0; v < s.resources(); ++v) {
    const std::int64_t cap = by_average ? spec.average() : spec.at(0, v);
    h.per_resource[v] = std::max<std::int64_t>(cap - s.load[v], 0);
    h.total += h.per_resource[v];
  }
  if (check_feasible(spec) == Feasibility::feasible && potential(s, spec).total > h.total)
    fail(ErrorCode::internal, "holes: potential exceeds total holes on a feasible spec");
  return h;
}

std::string_view to_string(Feasibility f) {
  switch (f) {
    case Feasibility::feasible: return "feasible";
    case Feasibility::infeasible: return "infeasible";
    case Feasibility::unknown: return "unknown";
  }
  return "?";
}

Feasibility check_feasible(const ThresholdSpec& spec) {
  if (spec.is_above_average()) return Feasibility::feasible;
  if (spec.kind() == ThresholdKind::user_independent) {
    std::int64_t capacity = 0;
    for (auto t : spec.values()) capacity += t;
    return capacity >= static_cast<std::int64_t>(spec.users()) ? Feasibility::feasible : Feasibility::infeasible;
  }
  if (spec.users() * spec.resources() > kExhaustiveFeasibilityCap) return Feasibility::unknown;
  return exhaustive_feasible(spec) ? Feasibility::feasible : Feasibility::infeasible;
}

State build_initial(const Graph& g, const ThresholdSpec& spec, const InitialPlacement& placement) {
  const std::size_t n = g.node_count(), m = spec.users();
  require(spec.resources() == n, "initial state: threshold spec has " + std::to_string(spec.resources()) +
                                     " resources but graph has " + std::to_string(n) + " nodes");
  std::vector<NodeId> assignment(m);
  if (const auto* one = std::get_if<AllOnOne>(&placement)) {
    require(one->node < n, "initial state: all_on_one node out of range");
    std::fill(assignment.begin(), assignment.end(), one->node);
  } else if (const auto* uni = std::get_if<UniformRandom>(&placement)) {
    Rng rng(uni->seed);
    for (auto& a : assignment) a = static_cast<NodeId>(rng.below(n));
  } else {
    const auto& adv = std::get<TwoCliqueAdversarial>(placement);
    const auto k = two_clique_cross_edges(g);
    require(k.has_value(), "two_clique_adversarial: graph is not a two-clique graph");
    const std::size_t h = n / 2;
    const auto t = static_cast<std::int64_t>(std::ceil((1.0 + adv.eps) * static_cast<double>(spec.average()) - 1e-9));
    require(spec.uniform_value() == t, "two_clique_adversarial: thresholds must all equal ceil((1+eps)*T-bar) = " +
                                           std::to_string(t));
    const std::size_t filled = static_cast<std::size_t>(t) * h;
    require(m >= filled, "two_clique_adversarial: m = " + std::to_string(m) + " < T*(n/2) = " + std::to_string(filled));
    // Heaviest node: the highest-index V1 vertex with floor(k/(n/2)) cross neighbors.
    const std::size_t floor_cross = *k / h;
    NodeId heavy = 0;
    bool found = false;
    for (NodeId v = 0; v < h; ++v)
      if (cross_degree(g, v) == floor_cross) heavy = v, found = true;
    if (!found) fail(ErrorCode::internal, "two_clique_adversarial: no V1 vertex with floor(k/(n/2)) cross edges");
    std::size_t i = 0;
    for (NodeId v = 0; v < h; ++v)
      for (std::int64_t j = 0; j < t; ++j) assignment[i++] = v;
    for (; i < m; ++i) assignment[i] = heavy;
  }
  return State::from_assignment(std::move(assignment), n);
}

ThresholdSpec random_feasible_thresholds(ThresholdKind kind, std::size_t m, std::size_t n, Rng& rng) {
  const auto avg = ceil_div(m, n);
  auto draw_above = [&] { return avg + 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(avg) + 2)); };
  switch (kind) {
    case ThresholdKind::user_independent: {
      std::vector<std::int64_t> t(n);
      std::int64_t total = 0;
      for (auto& v : t) total += (v = 1 + static_cast<std::int64_t>(rng.below(2 * static_cast<std::uint64_t>(avg) + 1)));
      while (total < static_cast<std::int64_t>(m)) {
        ++t[rng.below(n)];
        ++total;
      }
      return ThresholdSpec::user_independent(m, std::move(t));
    }
    case ThresholdKind::resource_independent: {
      std::vector<std::int64_t> t(m);
      for (auto& v : t) v = draw_above();
      return ThresholdSpec::resource_independent(std::move(t), n);
    }
    case ThresholdKind::arbitrary: {
      std::vector<std::int64_t> t(m * n);
      for (auto& v : t) v = draw_above();
      return ThresholdSpec::arbitrary(m, n, std::move(t));
    }
  }
  fail(ErrorCode::internal, "unhandled threshold kind");
}

}  // namespace tlb
