#pragma once

// Independent reference computations used to anchor tests and the `verify`
// suites. Nothing here calls into the protocol or spectral implementations.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "tlb/graph.hpp"
#include "tlb/protocols.hpp"
#include "tlb/threshold_model.hpp"

namespace tlb::oracle {

using Rational = boost::multiprecision::cpp_rational;

// Exact value of a finite double as a rational.
Rational exact(double x);

struct ExactRoundDistribution {
  std::map<std::int64_t, Rational> potential;                  // next-round Phi -> probability
  std::vector<std::map<std::int64_t, Rational>> departures;    // per resource: count -> probability
};

inline constexpr std::size_t kMaxExactUsers = 8;
inline constexpr std::size_t kMaxExactDegree = 3;

// Enumerates every coin outcome and neighbor choice of one user-controlled
// round. The per-user probability is the double the protocol would use,
// taken as an exact rational.
ExactRoundDistribution exact_user_round(const State& s, const Graph& g, const ThresholdSpec& spec, double alpha,
                                        MigrationRule rule);

enum class ClosedFormKind { complete, cycle };
ClosedFormKind parse_closed_form_kind(std::string_view name);

// complete: n-1 for u != v; cycle: d(n-d) with d the cycle distance.
double closed_form_hitting(ClosedFormKind kind, std::size_t n, NodeId u, NodeId v);

struct HittingEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::uint64_t cap_hits = 0;  // walks truncated at 100 n^3 steps
};

HittingEstimate monte_carlo_hitting(const Graph& g, NodeId u, NodeId v, std::uint64_t walks, std::uint64_t seed);

}  // namespace tlb::oracle
