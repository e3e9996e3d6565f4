#include <doctest.h>

#include <atomic>
#include <cmath>

#include "tlb/error.hpp"
#include "tlb/experiments.hpp"
#include "tlb/spectral.hpp"

using namespace tlb;

namespace {
Graph make(std::string_view kind, std::vector<std::int64_t> params, std::uint64_t seed) {
  return generate(kind, params, seed);
}
}  // namespace

namespace {

Campaign small_campaign(std::vector<double> ms, std::size_t seeds) {
  Campaign c;
  c.base.graph = GeneratedGraph{GeneratorKind::cycle, {6}, 0};
  c.base.thresholds = AboveAverageThresholds{0.25};
  c.base.initial = AllOnOne{0};
  c.variable = SweepVariable::m;
  c.values = std::move(ms);
  c.seeds = seeds;
  c.master_seed = 11;
  return c;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("single point, single seed campaign") {
    const auto r = run_campaign(small_campaign({30}, 1));
    REQUIRE(r.points.size() == 1);
    REQUIRE(r.runs.size() == 1);
    const auto& p = r.points[0];
    CHECK(p.n == 6);
    CHECK(p.m == 30);
    CHECK(p.runs == 1);
    CHECK(p.max_hitting == doctest::Approx(9.0));
    CHECK(p.mix_time == mixing_time(make("cycle", {6}, 0)));
    CHECK(p.ln_m == doctest::Approx(std::log(30.0)));
    CHECK_FALSE(p.n2_over_k.has_value());
    CHECK(r.runs[0].converged);
    CHECK(p.median_rounds == static_cast<double>(r.runs[0].rounds));
    CHECK(p.ratio_hitting == doctest::Approx(p.median_rounds / (9.0 * std::log(30.0))));
  }

  TEST_CASE("a balanced start needs zero rounds") {
    Campaign c = small_campaign({16}, 3);
    c.base.thresholds = UniformThresholds{1024};
    const auto r = run_campaign(c);
    for (const auto& run : r.runs) {
      CHECK(run.converged);
      CHECK(run.rounds == 0);
      CHECK(run.initial_potential == 0);
    }
    CHECK(r.points[0].convergence_rate == 1.0);
  }

  TEST_CASE("infeasible sweep points abort with the offending value") {
    Campaign c = small_campaign({3, 5, 7}, 1);
    c.base.thresholds = UniformThresholds{1};
    try {
      run_campaign(c);
      FAIL("expected an infeasible error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::infeasible);
      CHECK(std::string(e.what()).find("m=7") != std::string::npos);
    }
  }

  TEST_CASE("campaign validation") {
    CHECK_THROWS_AS(run_campaign(small_campaign({}, 1)), Error);
    CHECK_THROWS_AS(run_campaign(small_campaign({10}, 0)), Error);
    CHECK_THROWS_AS(run_campaign(small_campaign({2.5}, 1)), Error);
    Campaign k = small_campaign({1, 2}, 1);
    k.variable = SweepVariable::k;
    CHECK_THROWS_AS(run_campaign(k), Error);
    CHECK_THROWS_AS(sweep_convergence_vs_m(k), Error);
    CHECK(parse_sweep_variable(to_string(SweepVariable::gamma)) == SweepVariable::gamma);
    CHECK_THROWS_AS(parse_sweep_variable("n"), Error);
  }

  TEST_CASE("campaigns are reproducible from the master seed") {
    Campaign c = small_campaign({20, 60}, 4);
    c.base.initial = UniformRandom{};
    c.base.protocol.mode = Mode::user_controlled;
    const auto a = sweep_convergence_vs_m(c);
    const auto b = sweep_convergence_vs_m(c);
    REQUIRE(a.runs.size() == 8);
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
      CHECK(a.runs[i].point == i / 4);
      CHECK(a.runs[i].seed_index == i % 4);
      CHECK(a.runs[i].seed == b.runs[i].seed);
      CHECK(a.runs[i].rounds == b.runs[i].rounds);
      CHECK(a.runs[i].initial_potential == b.runs[i].initial_potential);
      CHECK(a.runs[i].excess_walks == b.runs[i].excess_walks);
    }
    c.master_seed = 12;
    const auto other = sweep_convergence_vs_m(c);
    CHECK(other.runs[0].seed != a.runs[0].seed);
  }

  TEST_CASE("aggregate recomputes point statistics") {
    CampaignResult r;
    r.points.resize(2);
    r.points[0].max_hitting = 10.0;
    r.points[0].mix_time = 4;
    r.points[0].ln_m = 2.0;
    r.points[1].max_hitting = 1.0;
    r.points[1].mix_time = 1;
    r.points[1].ln_m = 1.0;
    r.runs = {RunSummary{1, 0, 0, true, 7, 0, 0, 1, {}}, RunSummary{0, 2, 0, true, 40, 0, 0, 3, {}},
              RunSummary{0, 0, 0, true, 10, 0, 0, 0, {}}, RunSummary{0, 1, 0, false, 100, 0, 5, 5, {}}};
    aggregate(r);
    CHECK(r.runs[0].point == 0);
    CHECK(r.runs[0].seed_index == 0);
    CHECK(r.runs[3].point == 1);
    const auto& p = r.points[0];
    CHECK(p.runs == 3);
    CHECK(p.convergence_rate == doctest::Approx(2.0 / 3.0));
    CHECK(p.median_rounds == 40.0);
    CHECK(p.mean_rounds == 50.0);
    CHECK(p.max_rounds == 100);
    CHECK(p.mean_excess_walks == doctest::Approx(8.0 / 3.0));
    CHECK(p.ratio_hitting == doctest::Approx(2.0));
    CHECK(p.ratio_mixing == doctest::Approx(5.0));
    CHECK(r.points[1].median_rounds == 7.0);
  }

  TEST_CASE("median and rank correlation") {
    CHECK(median({3, 1, 2}) == 2.0);
    CHECK(median({4, 1, 3, 2}) == 2.5);
    CHECK_THROWS_AS(median({}), Error);
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {9, 5, 4, 1}) == doctest::Approx(-1.0));
    CHECK(spearman({1, 2, 2, 3}, {1, 2, 2, 3}) == doctest::Approx(1.0));
    // ranks (1,2,3) vs (2,1,3): 1 - 6*2/(3*8)
    CHECK(spearman({1, 2, 3}, {5, 4, 6}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(spearman({1}, {1}), Error);
    CHECK_THROWS_AS(spearman({1, 2}, {1, 2, 3}), Error);
  }

  TEST_CASE("balls into bins walk count and floors") {
    const Graph c8 = make("cycle", {8}, 0);
    const auto k = static_cast<std::uint64_t>(std::ceil(192.0 * (16.0 / 2.0) * std::log(8.0)));
    CHECK(k == 3195);
    CHECK(balls_bins_walk_count(c8) == k);
    const auto r = balls_bins_check(make("complete", {8}, 0), 20, 3);
    CHECK(r.t == 10);
    CHECK(r.trials == 20);
    CHECK(r.walks == balls_bins_walk_count(make("complete", {8}, 0)));
    for (auto f : r.floor) CHECK(f == static_cast<std::int64_t>(std::ceil(static_cast<double>(r.walks) / 16.0)));
    CHECK(r.passed <= r.trials);
    CHECK(r.pass_rate == doctest::Approx(static_cast<double>(r.passed) / 20.0));
    CHECK_THROWS_AS(balls_bins_check(c8, 5, 0, 0, 0), Error);
    CHECK_THROWS_AS(balls_bins_check(c8, 0, 0), Error);
    CHECK_THROWS_AS(balls_bins_check(c8, 5, 0, 8), Error);
  }

  TEST_CASE("spread check") {
    CHECK(spread_lambda(0, 8) == doctest::Approx(32.0 * std::log(8.0)));
    const double big = spread_lambda(1'000'000, 8);
    CHECK(big == doctest::Approx(8.0 * std::sqrt(2.0 * 125000.0 * (1.0 + 1.0 / 64.0) * std::log(8.0))));
    const double l = std::log(8.0);
    CHECK(spread_bound(80, 8, 0.5, 10) == doctest::Approx(10.0 * (1 + 1.0 / 64) + spread_lambda(80, 8) + 588.0 * l * l * 100));

    const Graph k5 = make("complete", {5}, 0);
    const auto spec = ThresholdSpec::user_independent(10, std::vector<std::int64_t>(5, 2));
    CHECK_THROWS_AS(spread_check(make("cycle", {4}, 0), ThresholdSpec::user_independent(4, {1, 1, 1, 1}),
                                 State::from_assignment({0, 1, 2, 3}, 4), 0.1, 1, 0),
                    Error);
    CHECK_THROWS_AS(spread_check(make("path", {3}, 0), ThresholdSpec::user_independent(3, {1, 1, 1}),
                                 State::from_assignment({0, 1, 2}, 3), 0.1, 1, 0),
                    Error);
    const auto calm = spread_check(k5, spec, State::from_assignment({0, 0, 1, 1, 2, 2, 3, 3, 4, 4}, 5), kDefaultAlpha, 4, 1);
    CHECK(calm.violations == 0);
    CHECK(calm.pairs == 20);
    for (auto p : calm.max_resource_potential) CHECK(p == 0);
    const auto busy = spread_check(k5, spec, State::from_assignment(std::vector<NodeId>(10, 0), 5), kDefaultAlpha, 4, 1);
    CHECK(busy.t == mixing_time(k5));
    CHECK(busy.violations == 0);
  }

  TEST_CASE("lift experiment with a large gamma") {
    const Graph g = make("cycle", {8}, 0);
    const auto spec = ThresholdSpec::above_average(200, 8, 0.25);
    const State s0 = build_initial(g, spec, AllOnOne{0});
    // Phi0 = 200 - 32 = 168 and 1680 / 8^4 < 1
    const auto r = lift_experiment(g, spec, s0, 4.0, 6, 2);
    CHECK(r.bound < 1.0);
    CHECK(r.increment == 0);
    CHECK(r.trigger_round == static_cast<std::uint64_t>(std::ceil(16.0 * 4.0 * std::log(8.0))));
    CHECK(r.max_hitting == doctest::Approx(16.0));
    std::size_t zero = 0;
    for (const auto& t : r.runs) zero += t.lift->max_resource_potential == 0 ? 1 : 0;
    CHECK(r.fraction_within_bound == doctest::Approx(static_cast<double>(zero) / 6.0));
    CHECK(r.all_converged);
    CHECK_THROWS_AS(lift_experiment(g, spec, s0, 0.5, 2, 0), Error);
    CHECK_THROWS_AS(lift_experiment(g, ThresholdSpec::resource_independent(std::vector<std::int64_t>(200, 3), 8), s0,
                                    1.0, 2, 0),
                    Error);
  }

  TEST_CASE("excess walk experiment bookkeeping") {
    const Graph g = make("cycle", {8}, 0);
    const auto spec = ThresholdSpec::user_independent(80, std::vector<std::int64_t>(8, 10));
    std::vector<std::uint64_t> asked;
    const auto r = excess_walk_experiment(
        g, spec,
        [&](std::uint64_t seed) {
          asked.push_back(seed);
          return State::from_assignment(std::vector<NodeId>(80, 0), 8);
        },
        0.1, MigrationRule::analysis, 50, 5, 9);
    CHECK(asked.size() == 5);
    CHECK(r.bound == doctest::Approx(30.0 * 0.01 * 50 * 8));
    REQUIRE(r.totals.size() == 5);
    double total = 0;
    for (auto t : r.totals) {
      CHECK(t >= 0);
      total += static_cast<double>(t);
    }
    CHECK(r.mean_total == doctest::Approx(total / 5));
  }

  TEST_CASE("plateau experiment targets and budgets") {
    const Graph g = make("cycle", {8}, 0);
    const auto spec = ThresholdSpec::above_average(1000, 8, 0.25);
    const State s0 = build_initial(g, spec, AllOnOne{0});
    const auto r = plateau_experiment(g, spec, s0, kDefaultAlpha, 3, 4);
    CHECK(r.target == 16 * 8 * 16);
    CHECK(r.budget == static_cast<std::uint64_t>(std::ceil(20.0 * 16.0 * std::log(1000.0))));
    CHECK(r.runs == 3);
    // Phi0 = 1000 - 157 = 843 is already below the target
    CHECK(r.reached == 3);
    for (auto x : r.rounds) CHECK(x == 0);
  }

  TEST_CASE("lower bound campaign needs two k values") {
    CHECK_THROWS_AS(lower_bound_experiment(10, 0.25, {5}, 100, 1, 0), Error);
    const auto r = lower_bound_experiment(10, 0.25, {1, 20}, 200, 2, 3);
    REQUIRE(r.campaign.points.size() == 2);
    CHECK(r.campaign.points[0].n2_over_k == doctest::Approx(100.0));
    CHECK(r.campaign.points[1].n2_over_k == doctest::Approx(5.0));
    CHECK(std::abs(r.rank_correlation) <= 1.0);
  }

  TEST_CASE("parallel_for visits every index and forwards errors") {
    std::vector<std::atomic<int>> hits(97);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                      if (i == 7) fail(ErrorCode::numeric, "boom");
                    }),
                    Error);
  }
}
