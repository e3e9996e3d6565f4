#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "tlb/error.hpp"
#include "tlb/graph.hpp"
#include "tlb/rng.hpp"
#include "tlb/threshold_model.hpp"

using namespace tlb;
namespace orc = testing_oracle;

namespace {

State on(std::vector<NodeId> a, std::size_t n) { return State::from_assignment(std::move(a), n); }

ThresholdSpec uniform(std::size_t m, std::size_t n, std::int64_t t) {
  return ThresholdSpec::user_independent(m, std::vector<std::int64_t>(n, t));
}

ThresholdSpec random_spec(Rng& rng, ThresholdKind kind, std::size_t m, std::size_t n) {
  auto draw = [&](std::size_t count) {
    std::vector<std::int64_t> t(count);
    for (auto& x : t) x = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(m / n + 3)));
    return t;
  };
  switch (kind) {
    case ThresholdKind::user_independent: return ThresholdSpec::user_independent(m, draw(n));
    case ThresholdKind::resource_independent: return ThresholdSpec::resource_independent(draw(m), n);
    case ThresholdKind::arbitrary: break;
  }
  return ThresholdSpec::arbitrary(m, n, draw(m * n));
}

State random_state(Rng& rng, std::size_t m, std::size_t n) {
  std::vector<NodeId> a(m);
  for (auto& v : a) v = static_cast<NodeId>(rng.below(n));
  return State::from_assignment(std::move(a), n);
}

}  // namespace

TEST_SUITE("threshold_model") {
  TEST_CASE("spec construction and derived values") {
    const auto s = ThresholdSpec::above_average(2000, 20, 0.25);
    CHECK(s.average() == 100);
    CHECK(s.uniform_value() == 125);
    CHECK(s.is_above_average());
    CHECK(s.eps_min() == doctest::Approx(0.25));
    // ceil((1+eps) * T-bar) when the product is not integral: 1.25 * 10 -> 13
    CHECK(ThresholdSpec::above_average(100, 10, 0.25).uniform_value() == 13);
    CHECK(ThresholdSpec::above_average(7, 3, 0.25).average() == 3);
    CHECK(ThresholdSpec::above_average(7, 3, 0.25).uniform_value() == 4);

    const auto tight = uniform(10, 5, 2);
    CHECK_FALSE(tight.is_above_average());
    CHECK(tight.eps_min() == 0.0);

    CHECK_THROWS_AS(ThresholdSpec::user_independent(3, {1, 0}), Error);
    CHECK_THROWS_AS(ThresholdSpec::user_independent(0, {1, 1}), Error);
    CHECK_THROWS_AS(ThresholdSpec::arbitrary(2, 2, {1, 1, 1}), Error);
    CHECK_THROWS_AS(ThresholdSpec::above_average(10, 2, -0.5), Error);
  }

  TEST_CASE("threshold lookup per kind") {
    const auto ri = ThresholdSpec::resource_independent({4, 7}, 3);
    CHECK(ri.at(1, 2) == 7);
    CHECK(ri.at(0, 0) == 4);
    const auto ar = ThresholdSpec::arbitrary(2, 3, {1, 2, 3, 4, 5, 6});
    CHECK(ar.at(1, 0) == 4);
    CHECK(ar.at(0, 2) == 3);
    CHECK(ar.min_threshold() == 1);
    const auto lifted = ar.lifted(10);
    CHECK(lifted.at(1, 2) == 16);
    CHECK(lifted.kind() == ThresholdKind::arbitrary);
    CHECK_THROWS_AS(ar.lifted(-1), Error);
  }

  TEST_CASE("eps_min is positive exactly for above-average specs") {
    Rng rng(3);
    for (int i = 0; i < 300; ++i) {
      const std::size_t n = 1 + rng.below(6), m = 1 + rng.below(30);
      const auto spec = random_spec(rng, static_cast<ThresholdKind>(rng.below(3)), m, n);
      CHECK((spec.eps_min() > 0) == spec.is_above_average());
    }
  }

  TEST_CASE("potential examples") {
    // user-independent T=2, x=5 -> 3
    CHECK(potential(on({0, 0, 0, 0, 0}, 1), uniform(5, 1, 2)).total == 3);
    CHECK(potential(on({0, 1, 1}, 2), uniform(3, 2, 2)).total == 0);
    // two users with thresholds 3 and 1 on the same resource: k = 1
    const auto ar = ThresholdSpec::arbitrary(2, 1, {3, 1});
    const State s = on({0, 0}, 1);
    CHECK(potential(s, ar).per_resource == std::vector<std::int64_t>{1});
    CHECK(orc::potential(s, ar) == std::vector<std::int64_t>{1});
    CHECK_FALSE(is_balanced(s, ar));
  }

  TEST_CASE("ranking orders by threshold then user id") {
    const auto ar = ThresholdSpec::arbitrary(4, 1, {2, 5, 2, 5});
    const std::vector<UserId> ascending{0, 1, 2, 3};
    CHECK(ranked_occupants(ascending, ar, 0) == std::vector<UserId>{1, 3, 0, 2});
    const auto ranked = ranked_occupants(ascending, ar, 0);
    CHECK(satisfied_prefix(ranked, ar, 0) == 2);
  }

  TEST_CASE("potential matches the definition on random states") {
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
      const std::size_t n = 1 + rng.below(6), m = 1 + rng.below(25);
      const auto kind = static_cast<ThresholdKind>(rng.below(3));
      const auto spec = random_spec(rng, kind, m, n);
      const State s = random_state(rng, m, n);
      const auto phi = potential(s, spec);
      CHECK(phi.per_resource == orc::potential(s, spec));
      CHECK(potential_by_ranking(s, spec).per_resource == phi.per_resource);
      CHECK(phi.total == std::accumulate(phi.per_resource.begin(), phi.per_resource.end(), std::int64_t{0}));
      CHECK((phi.total == 0) == is_balanced(s, spec));
      if (kind == ThresholdKind::user_independent)
        for (NodeId v = 0; v < n; ++v) CHECK(phi.per_resource[v] == std::max<std::int64_t>(s.load[v] - spec.at(0, v), 0));
    }
  }

  TEST_CASE("is_balanced examples") {
    CHECK(is_balanced(on({0, 1}, 4), uniform(2, 4, 1)));
    CHECK_FALSE(is_balanced(on({0, 0, 1}, 4), uniform(3, 4, 1)));
  }

  TEST_CASE("holes examples") {
    const auto h = holes(on({1}, 2), uniform(1, 2, 2));
    CHECK(h.per_resource == std::vector<std::int64_t>{2, 1});
    CHECK(h.total == 3);
    // above-average m=6, n=3: holes are measured against T-bar = 2
    const auto aa = ThresholdSpec::above_average(6, 3, 0.25);
    REQUIRE(aa.average() == 2);
    CHECK(holes(on({0, 0, 0, 0, 0, 0}, 3), aa).per_resource == std::vector<std::int64_t>{0, 2, 2});
    CHECK(holes(on({0, 0, 1, 1}, 2), uniform(4, 2, 2)).total == 0);
    CHECK_THROWS_AS(holes(on({0, 0}, 2), ThresholdSpec::arbitrary(2, 2, {1, 1, 1, 1})), Error);
  }

  TEST_CASE("potential never exceeds holes on feasible specs") {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
      const std::size_t n = 1 + rng.below(8), m = 1 + rng.below(40);
      const auto kind = rng.below(2) ? ThresholdKind::user_independent : static_cast<ThresholdKind>(rng.below(3));
      const auto spec = random_feasible_thresholds(kind, m, n, rng);
      if (spec.kind() != ThresholdKind::user_independent && !spec.is_above_average()) continue;
      const State s = random_state(rng, m, n);
      CHECK(potential(s, spec).total <= holes(s, spec).total);
    }
  }

  TEST_CASE("feasibility") {
    CHECK(check_feasible(uniform(5, 2, 2)) == Feasibility::infeasible);
    CHECK(check_feasible(uniform(4, 2, 2)) == Feasibility::feasible);
    CHECK(check_feasible(ThresholdSpec::above_average(1000, 7, 0.25)) == Feasibility::feasible);
    // three users, two resources, nobody tolerates company
    CHECK(check_feasible(ThresholdSpec::arbitrary(3, 2, {1, 1, 1, 1, 1, 1})) == Feasibility::infeasible);
    // users 0 and 1 may share resource 0; user 2 sits alone on resource 1
    CHECK(check_feasible(ThresholdSpec::arbitrary(3, 2, {2, 1, 2, 1, 1, 1})) == Feasibility::feasible);
    // resource-independent: user 2 needs a resource to itself, the others accept two
    CHECK(check_feasible(ThresholdSpec::resource_independent({2, 2, 1}, 2)) == Feasibility::feasible);
    CHECK(check_feasible(ThresholdSpec::resource_independent({2, 1, 1}, 2)) == Feasibility::infeasible);
    // beyond the exhaustive cap
    CHECK(check_feasible(ThresholdSpec::arbitrary(5, 5, std::vector<std::int64_t>(25, 1))) == Feasibility::unknown);
  }

  TEST_CASE("random feasible thresholds are feasible") {
    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
      const std::size_t n = 1 + rng.below(10), m = 1 + rng.below(60);
      const auto kind = static_cast<ThresholdKind>(rng.below(3));
      const auto spec = random_feasible_thresholds(kind, m, n, rng);
      CHECK(spec.kind() == kind);
      CHECK(check_feasible(spec) == Feasibility::feasible);
    }
  }

  TEST_CASE("state invariants") {
    const State s = on({2, 0, 2}, 3);
    CHECK(s.load == std::vector<std::int64_t>{1, 0, 2});
    CHECK(s.max_load() == 2);
    State bad = s;
    bad.load[1] = 1;
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK_THROWS_AS(on({3}, 3), Error);
    const Occupancy occ(s);
    CHECK(std::vector<UserId>(occ.on(2).begin(), occ.on(2).end()) == std::vector<UserId>{0, 2});
    CHECK(occ.on(1).empty());
  }

  TEST_CASE("initial placements") {
    const Graph path = generate("path", std::vector<std::int64_t>{5}, 0);
    const State one = build_initial(path, uniform(5, 5, 1), AllOnOne{0});
    CHECK(one.load == std::vector<std::int64_t>{5, 0, 0, 0, 0});
    CHECK_THROWS_AS(build_initial(path, uniform(5, 5, 1), AllOnOne{9}), Error);

    const State r1 = build_initial(path, uniform(50, 5, 20), UniformRandom{77});
    const State r2 = build_initial(path, uniform(50, 5, 20), UniformRandom{77});
    CHECK(r1 == r2);
    CHECK(std::accumulate(r1.load.begin(), r1.load.end(), std::int64_t{0}) == 50);
  }

  TEST_CASE("two-clique adversarial start") {
    const Graph g = generate("two_clique", std::vector<std::int64_t>{10, 5}, 0);
    const auto spec = ThresholdSpec::above_average(100, 10, 0.25);
    REQUIRE(spec.average() == 10);
    REQUIRE(spec.uniform_value() == 13);
    const State s = build_initial(g, spec, TwoCliqueAdversarial{0.25});
    // 5 * 13 = 65 placed evenly, the remaining 35 join one V1 node
    std::int64_t v1 = 0;
    int heavy = 0;
    for (NodeId v = 0; v < 5; ++v) {
      v1 += s.load[v];
      if (s.load[v] == 48) {
        ++heavy;
        CHECK(cross_degree(g, v) == 1);
      } else {
        CHECK(s.load[v] == 13);
      }
    }
    CHECK(v1 == 100);
    CHECK(heavy == 1);
    for (NodeId v = 5; v < 10; ++v) CHECK(s.load[v] == 0);

    const Graph uneven = generate("two_clique", std::vector<std::int64_t>{10, 7}, 0);
    const State u = build_initial(uneven, spec, TwoCliqueAdversarial{0.25});
    for (NodeId v = 0; v < 5; ++v)
      if (u.load[v] == 48) CHECK(cross_degree(uneven, v) == 1);  // floor(7/5)

    CHECK_THROWS_AS(build_initial(g, ThresholdSpec::above_average(11, 10, 0.25), TwoCliqueAdversarial{0.25}), Error);
    CHECK_THROWS_AS(build_initial(g, uniform(100, 10, 20), TwoCliqueAdversarial{0.25}), Error);
    CHECK_THROWS_AS(build_initial(generate("cycle", std::vector<std::int64_t>{10}, 0), spec, TwoCliqueAdversarial{0.25}),
                    Error);
  }

  TEST_CASE("kind names round trip") {
    for (auto k : {ThresholdKind::user_independent, ThresholdKind::resource_independent, ThresholdKind::arbitrary})
      CHECK(parse_threshold_kind(to_string(k)) == k);
    CHECK_THROWS_AS(parse_threshold_kind("fuzzy"), Error);
  }
}
