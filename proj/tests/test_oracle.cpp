#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tlb/error.hpp"
#include "tlb/oracle.hpp"
#include "tlb/protocols.hpp"
#include "tlb/spectral.hpp"

using namespace tlb;

namespace {
Graph make(std::string_view kind, std::vector<std::int64_t> params, std::uint64_t seed) {
  return generate(kind, params, seed);
}
}  // namespace
using oracle::Rational;

namespace {

Rational power(const Rational& x, int k) {
  Rational r = 1;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

Rational sum(const std::map<std::int64_t, Rational>& d) {
  Rational s = 0;
  for (const auto& [_, p] : d) s += p;
  return s;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("closed-form hitting times") {
    CHECK(oracle::closed_form_hitting(oracle::ClosedFormKind::complete, 8, 0, 5) == 7.0);
    CHECK(oracle::closed_form_hitting(oracle::ClosedFormKind::cycle, 8, 0, 3) == 15.0);
    CHECK(oracle::closed_form_hitting(oracle::ClosedFormKind::cycle, 8, 1, 6) == 15.0);
    CHECK(oracle::closed_form_hitting(oracle::ClosedFormKind::cycle, 8, 4, 4) == 0.0);
    CHECK(oracle::closed_form_hitting(oracle::ClosedFormKind::complete, 8, 2, 2) == 0.0);
    CHECK(oracle::parse_closed_form_kind("cycle") == oracle::ClosedFormKind::cycle);
    CHECK_THROWS_AS(oracle::parse_closed_form_kind("grid"), Error);
    CHECK_THROWS_AS(oracle::closed_form_hitting(oracle::ClosedFormKind::cycle, 4, 0, 4), Error);
  }

  TEST_CASE("closed forms agree with the linear solver for n <= 32") {
    for (std::int64_t n : {3, 4, 7, 8, 16, 32}) {
      const Matrix kc = hitting_times(make("complete", {n}, 0));
      const Matrix cc = hitting_times(make("cycle", {n}, 0));
      for (NodeId u = 0; u < static_cast<NodeId>(n); ++u)
        for (NodeId v = 0; v < static_cast<NodeId>(n); ++v) {
          CHECK(std::abs(kc(u, v) - oracle::closed_form_hitting(oracle::ClosedFormKind::complete, n, u, v)) <= 1e-9);
          CHECK(std::abs(cc(u, v) - oracle::closed_form_hitting(oracle::ClosedFormKind::cycle, n, u, v)) <= 1e-9);
        }
    }
  }

  TEST_CASE("exact doubles") {
    CHECK(oracle::exact(0.5) == Rational(1, 2));
    CHECK(oracle::exact(0.0) == Rational(0));
    CHECK(oracle::exact(-3.25) == Rational(-13, 4));
    CHECK(oracle::exact(0.1) != Rational(1, 10));
    CHECK(static_cast<double>(oracle::exact(kDefaultAlpha)) == kDefaultAlpha);
    CHECK_THROWS_AS(oracle::exact(std::nan("")), Error);
  }

  TEST_CASE("exact round on the 3-path with four users on node 0") {
    const Graph g = make("path", {3}, 0);
    const auto spec = ThresholdSpec::user_independent(4, {1, 1, 1});
    const State s = State::from_assignment({0, 0, 0, 0}, 3);
    const auto d = oracle::exact_user_round(s, g, spec, kDefaultAlpha, MigrationRule::stated);
    CHECK(sum(d.potential) == 1);
    // Every mover lands on node 1. Phi stays 3 iff nobody or everybody moves.
    const Rational p = oracle::exact(migration_probability(4, 1, kDefaultAlpha, MigrationRule::stated));
    CHECK(p == oracle::exact(3 * kDefaultAlpha));
    const Rational stay = power(1 - p, 4) + power(p, 4);
    REQUIRE(d.potential.size() == 2);
    CHECK(d.potential.at(3) == stay);
    CHECK(d.potential.at(2) == 1 - stay);
    for (std::size_t v = 0; v < 3; ++v) CHECK(sum(d.departures[v]) == 1);
    CHECK(d.departures[0].at(4) == power(p, 4));
    CHECK(d.departures[1].size() == 1);
    CHECK(d.departures[1].at(0) == 1);
  }

  TEST_CASE("departure marginals are binomial under both rules") {
    const Graph g = make("cycle", {4}, 0);
    const auto spec = ThresholdSpec::user_independent(7, {2, 1, 1, 3});
    const State s = State::from_assignment({0, 0, 0, 0, 0, 1, 1}, 4);
    for (auto rule : {MigrationRule::stated, MigrationRule::analysis}) {
      const auto d = oracle::exact_user_round(s, g, spec, kDefaultAlpha, rule);
      CHECK(sum(d.potential) == 1);
      for (NodeId v : {0u, 1u}) {
        const std::int64_t x = s.load[v], t = spec.at(0, v);
        const Rational p = oracle::exact(migration_probability(x, t, kDefaultAlpha, rule));
        Rational choose = 1;
        for (std::int64_t k = 0; k <= x; ++k) {
          if (k > 0) choose = choose * (x - k + 1) / k;
          const auto it = d.departures[v].find(k);
          CHECK((it == d.departures[v].end() ? Rational(0) : it->second) == choose * power(p, static_cast<int>(k)) * power(1 - p, static_cast<int>(x - k)));
        }
      }
    }
  }

  TEST_CASE("balanced state gives a point mass at zero") {
    const Graph g = make("path", {3}, 0);
    const auto d = oracle::exact_user_round(State::from_assignment({0, 1, 2}, 3), g,
                                            ThresholdSpec::user_independent(3, {1, 1, 1}), kDefaultAlpha,
                                            MigrationRule::stated);
    REQUIRE(d.potential.size() == 1);
    CHECK(d.potential.begin()->first == 0);
    CHECK(d.potential.begin()->second == 1);
  }

  TEST_CASE("exact enumeration limits") {
    const Graph path = make("path", {3}, 0);
    CHECK_THROWS_AS(oracle::exact_user_round(State::from_assignment(std::vector<NodeId>(9, 0), 3), path,
                                             ThresholdSpec::user_independent(9, {3, 3, 3}), kDefaultAlpha,
                                             MigrationRule::stated),
                    Error);
    const Graph k5 = make("complete", {5}, 0);
    CHECK_THROWS_AS(oracle::exact_user_round(State::from_assignment({0, 0}, 5), k5,
                                             ThresholdSpec::user_independent(2, {1, 1, 1, 1, 1}), kDefaultAlpha,
                                             MigrationRule::stated),
                    Error);
    CHECK_THROWS_AS(oracle::exact_user_round(State::from_assignment({0, 0}, 3), path,
                                             ThresholdSpec::resource_independent({1, 1}, 3), kDefaultAlpha,
                                             MigrationRule::stated),
                    Error);
  }

  TEST_CASE("Monte Carlo hitting estimates") {
    const Graph k4 = make("complete", {4}, 0);
    const auto same = oracle::monte_carlo_hitting(k4, 2, 2, 100, 1);
    CHECK(same.mean == 0.0);
    CHECK(same.standard_error == 0.0);
    const auto a = oracle::monte_carlo_hitting(k4, 0, 1, 10'000, 7);
    const auto b = oracle::monte_carlo_hitting(k4, 0, 1, 10'000, 7);
    CHECK(a.mean == b.mean);
    CHECK(a.standard_error == b.standard_error);
    CHECK(a.cap_hits == 0);
    // geometric with success 1/3: mean 3, sd sqrt(6)
    CHECK(std::abs(a.mean - 3.0) <= 0.1);
    CHECK(std::abs(a.standard_error - std::sqrt(6.0 / 10'000)) <= 0.005);
    CHECK(std::abs(a.mean - hitting_times(k4)(0, 1)) <= 4.0 * a.standard_error);
    CHECK_THROWS_AS(oracle::monte_carlo_hitting(k4, 0, 1, 0, 1), Error);
    CHECK_THROWS_AS(oracle::monte_carlo_hitting(k4, 0, 4, 10, 1), Error);
  }
}
