#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "tlb/graph.hpp"
#include "tlb/rng.hpp"

namespace tlb {

using UserId = std::uint32_t;

enum class ThresholdKind { user_independent, resource_independent, arbitrary };

ThresholdKind parse_threshold_kind(std::string_view name);
std::string_view to_string(ThresholdKind kind);

// Thresholds T_v^i for m users and n resources. Storage depends on the kind:
// one value per resource, one per user, or a full user-major m x n table.
class ThresholdSpec {
 public:
  static ThresholdSpec user_independent(std::size_t m, std::vector<std::int64_t> per_resource);
  static ThresholdSpec resource_independent(std::vector<std::int64_t> per_user, std::size_t n);
  static ThresholdSpec arbitrary(std::size_t m, std::size_t n, std::vector<std::int64_t> user_major_table);
  // Uniform user-independent thresholds ceil((1 + eps) * ceil(m/n)).
  static ThresholdSpec above_average(std::size_t m, std::size_t n, double eps);

  ThresholdKind kind() const noexcept { return kind_; }
  std::size_t users() const noexcept { return m_; }
  std::size_t resources() const noexcept { return n_; }
  const std::vector<std::int64_t>& values() const noexcept { return values_; }

  std::int64_t at(UserId user, NodeId resource) const {
    switch (kind_) {
      case ThresholdKind::user_independent: return values_[resource];
      case ThresholdKind::resource_independent: return values_[user];
      case ThresholdKind::arbitrary: break;
    }
    return values_[static_cast<std::size_t>(user) * n_ + resource];
  }

  // T-bar = ceil(m / n)
  std::int64_t average() const noexcept { return average_; }
  std::int64_t min_threshold() const noexcept { return min_; }
  // min_{i,v} T_v^i / T-bar - 1
  double eps_min() const noexcept { return static_cast<double>(min_) / static_cast<double>(average_) - 1.0; }
  bool is_above_average() const noexcept { return min_ > average_; }
  // True for specs built by above_average() (and lifts of them).
  bool from_eps_recipe() const noexcept { return from_eps_recipe_; }
  // Every T_v^i equal; returns that value or 0.
  std::int64_t uniform_value() const;

  // Copy with every threshold raised by `increment` (>= 0).
  ThresholdSpec lifted(std::int64_t increment) const;

 private:
  ThresholdSpec(ThresholdKind kind, std::size_t m, std::size_t n, std::vector<std::int64_t> values);

  ThresholdKind kind_;
  std::size_t m_;
  std::size_t n_;
  std::vector<std::int64_t> values_;
  std::int64_t average_;
  std::int64_t min_;
  bool from_eps_recipe_ = false;
};

// Assignment a_i of users to resources together with the load profile x_v.
struct State {
  std::vector<NodeId> assignment;
  std::vector<std::int64_t> load;

  static State from_assignment(std::vector<NodeId> assignment, std::size_t resources);
  std::size_t users() const noexcept { return assignment.size(); }
  std::size_t resources() const noexcept { return load.size(); }
  std::int64_t max_load() const;
  // Throws unless load matches assignment.
  void validate() const;

  friend bool operator==(const State&, const State&) = default;
};

// Users grouped by resource, ascending user id within each group.
struct Occupancy {
  std::vector<std::size_t> offsets;  // size n + 1
  std::vector<UserId> users;

  explicit Occupancy(const State& s);
  std::span<const UserId> on(NodeId v) const {
    return {users.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }
};

// Occupants of v in non-increasing threshold order, ties by ascending user id.
std::vector<UserId> ranked_occupants(std::span<const UserId> ascending, const ThresholdSpec& spec, NodeId v);
// Length of the satisfied prefix of a ranking: max p with p <= T at position p, or 0.
std::size_t satisfied_prefix(std::span<const UserId> ranked, const ThresholdSpec& spec, NodeId v);

struct Potential {
  std::int64_t total = 0;
  std::vector<std::int64_t> per_resource;
};

// Phi_v = x_v - k. User-independent specs take the max{x_v - T_v, 0} shortcut.
Potential potential(const State& s, const ThresholdSpec& spec);
// Always evaluates the ranking definition, whatever the kind.
Potential potential_by_ranking(const State& s, const ThresholdSpec& spec);

bool is_balanced(const State& s, const ThresholdSpec& spec);

struct Holes {
  std::int64_t total = 0;
  std::vector<std::int64_t> per_resource;
};

// User-independent values give h_v = max{0, T_v - x_v}; specs from above_average()
// and above-average specs of the other kinds give h_v = max{0, T-bar - x_v}.
Holes holes(const State& s, const ThresholdSpec& spec);

enum class Feasibility { feasible, infeasible, unknown };
std::string_view to_string(Feasibility f);

// Exhaustive search is attempted for m * n <= this cap.
inline constexpr std::size_t kExhaustiveFeasibilityCap = 24;
Feasibility check_feasible(const ThresholdSpec& spec);

struct AllOnOne {
  NodeId node = 0;
};
struct UniformRandom {
  std::uint64_t seed = 0;
};
struct TwoCliqueAdversarial {
  double eps = 0.25;
};
using InitialPlacement = std::variant<AllOnOne, UniformRandom, TwoCliqueAdversarial>;

State build_initial(const Graph& g, const ThresholdSpec& spec, const InitialPlacement& placement);

// Random thresholds that are guaranteed feasible: user-independent draws are
// topped up until sum T_v >= m, other kinds are drawn above average.
ThresholdSpec random_feasible_thresholds(ThresholdKind kind, std::size_t m, std::size_t n, Rng& rng);

}  // namespace tlb
