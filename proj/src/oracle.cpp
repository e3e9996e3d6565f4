#include "tlb/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "tlb/error.hpp"
#include "tlb/rng.hpp"

namespace tlb::oracle {

Rational exact(double x) {
  require(std::isfinite(x), "oracle: non-finite probability");
  if (x == 0.0) return Rational(0);
  int exponent = 0;
  const double frac = std::frexp(x, &exponent);  // x = frac * 2^exponent, 0.5 <= |frac| < 1
  const auto mantissa = static_cast<std::int64_t>(std::ldexp(frac, 53));
  exponent -= 53;
  Rational r(mantissa);
  const boost::multiprecision::cpp_int two_pow = boost::multiprecision::pow(boost::multiprecision::cpp_int(2),
                                                                            static_cast<unsigned>(std::abs(exponent)));
  return exponent >= 0 ? r * Rational(two_pow) : r / Rational(two_pow);
}

namespace {

struct Enumeration {
  const State& s;
  const Graph& g;
  const ThresholdSpec& spec;
  std::vector<Rational> stay;  // per resource: 1 - p_v
  std::vector<Rational> hop;   // per resource: p_v / deg(v)
  std::vector<std::int64_t> load;
  std::vector<std::int64_t> departed;
  ExactRoundDistribution out;

  void leaf(const Rational& prob) {
    std::int64_t phi = 0;
    for (NodeId v = 0; v < load.size(); ++v) phi += std::max<std::int64_t>(load[v] - spec.at(0, v), 0);
    out.potential[phi] += prob;
    for (NodeId v = 0; v < load.size(); ++v) out.departures[v][departed[v]] += prob;
  }

  void visit(UserId i, const Rational& prob) {
    if (i == s.users()) {
      leaf(prob);
      return;
    }
    const NodeId v = s.assignment[i];
    if (stay[v] != 0) visit(i + 1, prob * stay[v]);
    if (hop[v] == 0) return;
    --load[v];
    ++departed[v];
    for (NodeId w : g.neighbors(v)) {
      ++load[w];
      visit(i + 1, prob * hop[v]);
      --load[w];
    }
    ++load[v];
    --departed[v];
  }
};

}  // namespace

ExactRoundDistribution exact_user_round(const State& s, const Graph& g, const ThresholdSpec& spec, double alpha,
                                        MigrationRule rule) {
  require(spec.kind() == ThresholdKind::user_independent, "oracle: user-independent thresholds required");
  if (s.users() > kMaxExactUsers || degree_stats(g).max_degree > kMaxExactDegree)
    fail(ErrorCode::invalid_argument, "oracle: instance too large for exact enumeration (m <= 8, max degree <= 3)");
  const std::size_t n = s.resources();
  Enumeration e{s, g, spec, {}, {}, s.load, std::vector<std::int64_t>(n, 0), {}};
  e.out.departures.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    const std::int64_t x = s.load[v], t = spec.at(0, v);
    const std::int64_t phi = std::max<std::int64_t>(x - t, 0);
    double p = 0.0;
    if (phi > 0) {
      p = rule == MigrationRule::analysis ? alpha * static_cast<double>(phi) / static_cast<double>(x)
                                          : std::min(1.0, alpha * static_cast<double>(phi) / static_cast<double>(t));
    }
    const Rational pr = exact(p);
    e.stay.push_back(Rational(1) - pr);
    e.hop.push_back(pr / Rational(static_cast<long long>(g.degree(v))));
  }
  e.visit(0, Rational(1));
  return std::move(e.out);
}

ClosedFormKind parse_closed_form_kind(std::string_view name) {
  if (name == "complete") return ClosedFormKind::complete;
  if (name == "cycle") return ClosedFormKind::cycle;
  fail(ErrorCode::invalid_argument, "oracle: no closed-form hitting time for '" + std::string(name) + "'");
}

double closed_form_hitting(ClosedFormKind kind, std::size_t n, NodeId u, NodeId v) {
  require(u < n && v < n, "oracle: node out of range");
  if (u == v) return 0.0;
  if (kind == ClosedFormKind::complete) return static_cast<double>(n - 1);
  const std::size_t diff = u > v ? u - v : v - u;
  const std::size_t d = std::min(diff, n - diff);
  return static_cast<double>(d * (n - d));
}

HittingEstimate monte_carlo_hitting(const Graph& g, NodeId u, NodeId v, std::uint64_t walks, std::uint64_t seed) {
  require(walks >= 1, "oracle: walks must be >= 1");
  require(u < g.node_count() && v < g.node_count(), "oracle: node out of range");
  HittingEstimate est;
  if (u == v) return est;
  const double nn = static_cast<double>(g.node_count());
  const auto cap = static_cast<std::uint64_t>(100.0 * nn * nn * nn);
  Rng rng(seed);
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t w = 0; w < walks; ++w) {
    NodeId at = u;
    std::uint64_t steps = 0;
    while (at != v && steps < cap) {
      const auto nb = g.neighbors(at);
      at = nb[rng.below(nb.size())];
      ++steps;
    }
    if (at != v) ++est.cap_hits;
    const auto x = static_cast<double>(steps);
    sum += x;
    sum_sq += x * x;
  }
  const auto k = static_cast<double>(walks);
  est.mean = sum / k;
  const double var = walks > 1 ? std::max(0.0, (sum_sq - k * est.mean * est.mean) / (k - 1.0)) : 0.0;
  est.standard_error = std::sqrt(var / k);
  return est;
}

}  // namespace tlb::oracle
