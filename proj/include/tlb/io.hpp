#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "tlb/experiments.hpp"
#include "tlb/graph.hpp"
#include "tlb/protocols.hpp"
#include "tlb/spectral.hpp"
#include "tlb/threshold_model.hpp"

namespace tlb::io {

using Json = nlohmann::json;

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

// Threshold spec file: {kind, m, n, values}; values is a list (one entry per
// resource or per user) or an m x n nested table for kind "arbitrary".
Json to_json(const ThresholdSpec& spec);
ThresholdSpec thresholds_from_json(const Json& j);

// State snapshot: {assignment, load}.
Json to_json(const State& s);
State state_from_json(const Json& j);

Json to_json(const ProtocolConfig& cfg);
ProtocolConfig protocol_from_json(const Json& j);

// {n, edges, bipartite, pi, mu, mix_time, max_hitting}
Json analysis_json(const Graph& g, const WalkAnalysis& a);

// Relative file references inside configs resolve against `base_dir`.
GraphRecipe graph_recipe_from_json(const Json& j, const std::filesystem::path& base_dir);
SimulationConfig simulation_from_json(const Json& j, const std::filesystem::path& base_dir);
Campaign campaign_from_json(const Json& j, const std::filesystem::path& base_dir, std::uint64_t master_seed);

struct LowerBoundConfig {
  std::size_t n = 20;
  double eps = 0.25;
  std::vector<std::int64_t> k;
  std::size_t m = 2000;
  std::size_t seeds = 20;
  std::uint64_t max_rounds = 1'000'000;
};
LowerBoundConfig lower_bound_from_json(const Json& j);

std::string format_number(double x);

// Header `round,potential,max_load,migrations,excess_walks`.
void write_trace_csv(const RunTrace& trace, std::ostream& out);
Json trace_rows_json(const RunTrace& trace);
// {converged, rounds, final_potential, seed, config}
Json run_summary_json(const RunTrace& trace, const Json& config);

void write_campaign_csv(const CampaignResult& result, std::ostream& out);
void write_runs_csv(const CampaignResult& result, std::ostream& out);
Json campaign_points_json(const CampaignResult& result);
Json campaign_summary_json(const CampaignResult& result, const Json& config, std::uint64_t master_seed);

// Median rounds against the sweep variable, log-scaled x axis.
void write_svg_chart(const CampaignResult& result, std::ostream& out, const std::string& title);

}  // namespace tlb::io
