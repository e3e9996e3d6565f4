#include "tlb/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "tlb/error.hpp"

namespace tlb::io {

namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const char* what) {
  require(j.is_object(), std::string(what) + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    require(ok, std::string(what) + ": unknown key '" + key + "'");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::vector<std::int64_t> int_list(const Json& j, const char* what) {
  require(j.is_array(), std::string(what) + ": expected a list of integers");
  std::vector<std::int64_t> out;
  for (const auto& v : j) {
    require(v.is_number_integer(), std::string(what) + ": expected integers");
    out.push_back(v.get<std::int64_t>());
  }
  return out;
}

std::size_t positive(const Json& j, const char* what) {
  require(j.is_number_integer() && j.get<std::int64_t>() >= 1, std::string(what) + " must be a positive integer");
  return j.get<std::size_t>();
}

}  // namespace

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    fail(ErrorCode::invalid_argument, "malformed JSON in '" + path.string() + "': " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorCode::io, "write failed for '" + path.string() + "'");
}

Json to_json(const ThresholdSpec& spec) {
  Json j{{"kind", to_string(spec.kind())}, {"m", spec.users()}, {"n", spec.resources()}};
  if (spec.kind() == ThresholdKind::arbitrary) {
    Json table = Json::array();
    for (UserId i = 0; i < spec.users(); ++i) {
      Json row = Json::array();
      for (NodeId v = 0; v < spec.resources(); ++v) row.push_back(spec.at(i, v));
      table.push_back(std::move(row));
    }
    j["values"] = std::move(table);
  } else {
    j["values"] = spec.values();
  }
  return j;
}

ThresholdSpec thresholds_from_json(const Json& j) {
  check_keys(j, {"kind", "m", "n", "values"}, "threshold spec");
  require(j.contains("kind") && j.contains("m") && j.contains("n") && j.contains("values"),
          "threshold spec: requires kind, m, n and values");
  const auto kind = parse_threshold_kind(j.at("kind").get<std::string>());
  const std::size_t m = positive(j.at("m"), "threshold spec: m");
  const std::size_t n = positive(j.at("n"), "threshold spec: n");
  const Json& values = j.at("values");
  switch (kind) {
    case ThresholdKind::user_independent: {
      if (values.is_number_integer()) return ThresholdSpec::user_independent(m, std::vector<std::int64_t>(n, values.get<std::int64_t>()));
      auto t = int_list(values, "threshold spec values");
      require(t.size() == n, "threshold spec: user_independent needs n values");
      return ThresholdSpec::user_independent(m, std::move(t));
    }
    case ThresholdKind::resource_independent: {
      if (values.is_number_integer())
        return ThresholdSpec::resource_independent(std::vector<std::int64_t>(m, values.get<std::int64_t>()), n);
      auto t = int_list(values, "threshold spec values");
      require(t.size() == m, "threshold spec: resource_independent needs m values");
      return ThresholdSpec::resource_independent(std::move(t), n);
    }
    case ThresholdKind::arbitrary: {
      require(values.is_array() && values.size() == m, "threshold spec: arbitrary needs an m x n table");
      std::vector<std::int64_t> table;
      for (const auto& row : values) {
        auto r = int_list(row, "threshold spec row");
        require(r.size() == n, "threshold spec: every row of an arbitrary table needs n values");
        table.insert(table.end(), r.begin(), r.end());
      }
      return ThresholdSpec::arbitrary(m, n, std::move(table));
    }
  }
  fail(ErrorCode::internal, "unhandled threshold kind");
}

Json to_json(const State& s) { return Json{{"assignment", s.assignment}, {"load", s.load}}; }

State state_from_json(const Json& j) {
  check_keys(j, {"assignment", "load"}, "state");
  require(j.contains("assignment") && j.contains("load"), "state: requires assignment and load");
  State s;
  for (auto a : int_list(j.at("assignment"), "state assignment")) {
    require(a >= 0, "state: negative resource id");
    s.assignment.push_back(static_cast<NodeId>(a));
  }
  s.load = int_list(j.at("load"), "state load");
  s.validate();
  return s;
}

Json to_json(const ProtocolConfig& cfg) {
  Json j{{"mode", to_string(cfg.mode)}, {"alpha", cfg.alpha}, {"migration_rule", to_string(cfg.migration_rule)}};
  if (cfg.lift) {
    Json lift{{"gamma", cfg.lift->gamma}};
    if (cfg.lift->trigger_round) lift["trigger_round"] = *cfg.lift->trigger_round;
    if (cfg.lift->increment) lift["increment"] = *cfg.lift->increment;
    j["lift"] = std::move(lift);
  }
  return j;
}

ProtocolConfig protocol_from_json(const Json& j) {
  check_keys(j, {"mode", "alpha", "migration_rule", "lift"}, "protocol");
  ProtocolConfig cfg;
  if (j.contains("mode")) cfg.mode = parse_mode(j.at("mode").get<std::string>());
  if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
  if (j.contains("migration_rule")) cfg.migration_rule = parse_migration_rule(j.at("migration_rule").get<std::string>());
  if (j.contains("lift") && !j.at("lift").is_null()) {
    const Json& l = j.at("lift");
    check_keys(l, {"gamma", "trigger_round", "increment"}, "protocol.lift");
    LiftConfig lift;
    if (l.contains("gamma")) lift.gamma = l.at("gamma").get<double>();
    if (l.contains("trigger_round")) lift.trigger_round = l.at("trigger_round").get<std::uint64_t>();
    if (l.contains("increment")) lift.increment = l.at("increment").get<std::int64_t>();
    cfg.lift = lift;
  }
  require(cfg.alpha > 0.0 && cfg.alpha < 1.0, "protocol: alpha must lie in (0, 1)");
  return cfg;
}

Json analysis_json(const Graph& g, const WalkAnalysis& a) {
  return Json{{"n", g.node_count()}, {"edges", g.edge_count()}, {"bipartite", a.bipartite}, {"pi", a.pi},
              {"mu", a.mu},          {"mix_time", a.mix_time},  {"max_hitting", a.max_hitting}};
}

GraphRecipe graph_recipe_from_json(const Json& j, const std::filesystem::path& base_dir) {
  check_keys(j, {"kind", "params", "seed", "file"}, "graph");
  if (j.contains("file")) {
    require(!j.contains("kind"), "graph: give either 'file' or 'kind', not both");
    return GraphFile{resolve(base_dir, j.at("file").get<std::string>()).string()};
  }
  require(j.contains("kind"), "graph: requires 'kind' or 'file'");
  GeneratedGraph gen;
  gen.kind = parse_generator_kind(j.at("kind").get<std::string>());
  if (j.contains("params")) gen.params = int_list(j.at("params"), "graph params");
  if (j.contains("seed")) gen.seed = j.at("seed").get<std::uint64_t>();
  return gen;
}

namespace {

ThresholdRecipe threshold_recipe_from_json(const Json& j, const std::filesystem::path& base_dir) {
  require(j.is_object(), "thresholds: expected a JSON object");
  if (j.contains("above_average")) {
    check_keys(j, {"above_average"}, "thresholds");
    return AboveAverageThresholds{j.at("above_average").get<double>()};
  }
  if (j.contains("uniform")) {
    check_keys(j, {"uniform"}, "thresholds");
    return UniformThresholds{j.at("uniform").get<std::int64_t>()};
  }
  if (j.contains("file")) {
    check_keys(j, {"file"}, "thresholds");
    return ExplicitThresholds{thresholds_from_json(read_json_file(resolve(base_dir, j.at("file").get<std::string>())))};
  }
  return ExplicitThresholds{thresholds_from_json(j)};
}

InitialRecipe initial_recipe_from_json(const Json& j, const std::filesystem::path& base_dir) {
  check_keys(j, {"kind", "node", "eps", "file"}, "initial");
  if (j.contains("file")) return ExplicitState{state_from_json(read_json_file(resolve(base_dir, j.at("file").get<std::string>())))};
  require(j.contains("kind"), "initial: requires 'kind' or 'file'");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "all_on_one") return AllOnOne{j.value("node", NodeId{0})};
  if (kind == "uniform_random") return UniformRandom{};
  if (kind == "two_clique_adversarial") return TwoCliqueAdversarial{j.value("eps", 0.25)};
  fail(ErrorCode::invalid_argument, "initial: unknown kind '" + kind + "'");
}

void fill_simulation(SimulationConfig& cfg, const Json& j, const std::filesystem::path& base_dir) {
  require(j.contains("graph"), "config: requires 'graph'");
  require(j.contains("thresholds"), "config: requires 'thresholds'");
  cfg.graph = graph_recipe_from_json(j.at("graph"), base_dir);
  cfg.thresholds = threshold_recipe_from_json(j.at("thresholds"), base_dir);
  cfg.initial = j.contains("initial") ? initial_recipe_from_json(j.at("initial"), base_dir) : InitialRecipe{AllOnOne{0}};
  if (j.contains("protocol")) cfg.protocol = protocol_from_json(j.at("protocol"));
  if (j.contains("m")) cfg.m = positive(j.at("m"), "config: m");
  if (j.contains("max_rounds")) cfg.options.max_rounds = j.at("max_rounds").get<std::uint64_t>();
  if (j.contains("stop_potential_factor")) cfg.stop_potential_factor = j.at("stop_potential_factor").get<double>();
}

}  // namespace

SimulationConfig simulation_from_json(const Json& j, const std::filesystem::path& base_dir) {
  check_keys(j, {"graph", "m", "thresholds", "initial", "protocol", "max_rounds", "stop_potential_factor"},
             "simulation config");
  SimulationConfig cfg;
  fill_simulation(cfg, j, base_dir);
  return cfg;
}

Campaign campaign_from_json(const Json& j, const std::filesystem::path& base_dir, std::uint64_t master_seed) {
  check_keys(j, {"graph", "m", "thresholds", "initial", "protocol", "max_rounds", "stop_potential_factor", "sweep", "seeds"},
             "campaign config");
  Campaign c;
  fill_simulation(c.base, j, base_dir);
  require(j.contains("sweep"), "campaign: requires 'sweep'");
  const Json& sweep = j.at("sweep");
  check_keys(sweep, {"variable", "values"}, "campaign sweep");
  c.variable = parse_sweep_variable(sweep.at("variable").get<std::string>());
  require(sweep.at("values").is_array() && !sweep.at("values").empty(), "campaign: sweep values must be a non-empty list");
  for (const auto& v : sweep.at("values")) c.values.push_back(v.get<double>());
  c.seeds = j.contains("seeds") ? positive(j.at("seeds"), "campaign: seeds") : 1;
  c.master_seed = master_seed;
  return c;
}

LowerBoundConfig lower_bound_from_json(const Json& j) {
  check_keys(j, {"n", "eps", "k", "m", "seeds", "max_rounds"}, "lower-bound config");
  LowerBoundConfig c;
  if (j.contains("n")) c.n = positive(j.at("n"), "lower-bound: n");
  if (j.contains("eps")) c.eps = j.at("eps").get<double>();
  require(j.contains("k"), "lower-bound: requires the list 'k'");
  c.k = int_list(j.at("k"), "lower-bound k");
  if (j.contains("m")) c.m = positive(j.at("m"), "lower-bound: m");
  if (j.contains("seeds")) c.seeds = positive(j.at("seeds"), "lower-bound: seeds");
  if (j.contains("max_rounds")) c.max_rounds = j.at("max_rounds").get<std::uint64_t>();
  return c;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

void write_trace_csv(const RunTrace& trace, std::ostream& out) {
  out << "round,potential,max_load,migrations,excess_walks\n";
  for (const auto& r : trace.rows)
    out << r.round << ',' << r.potential << ',' << r.max_load << ',' << r.migrations << ',' << r.excess_walks << '\n';
}

Json trace_rows_json(const RunTrace& trace) {
  Json rows = Json::array();
  for (const auto& r : trace.rows)
    rows.push_back({{"round", r.round},
                    {"potential", r.potential},
                    {"max_load", r.max_load},
                    {"migrations", r.migrations},
                    {"excess_walks", r.excess_walks}});
  return rows;
}

Json run_summary_json(const RunTrace& trace, const Json& config) {
  Json j{{"converged", trace.converged},
         {"rounds", trace.rounds},
         {"final_potential", trace.final_potential},
         {"seed", trace.seed},
         {"config", config}};
  if (trace.lift) {
    j["lift"] = {{"trigger_round", trace.lift->trigger_round},
                 {"increment", trace.lift->increment},
                 {"applied", trace.lift->applied},
                 {"max_resource_potential", trace.lift->max_resource_potential},
                 {"rounds_after", trace.lift->rounds_after}};
  }
  return j;
}

void write_campaign_csv(const CampaignResult& result, std::ostream& out) {
  out << to_string(result.variable)
      << ",n,m,runs,convergence_rate,median_rounds,mean_rounds,max_rounds,mean_excess_walks,"
         "max_hitting,mix_time,ln_m,n2_over_k,ratio_hitting,ratio_mixing\n";
  for (const auto& p : result.points) {
    out << format_number(p.value) << ',' << p.n << ',' << p.m << ',' << p.runs << ',' << format_number(p.convergence_rate)
        << ',' << format_number(p.median_rounds) << ',' << format_number(p.mean_rounds) << ',' << p.max_rounds << ','
        << format_number(p.mean_excess_walks) << ',' << format_number(p.max_hitting) << ',' << p.mix_time << ','
        << format_number(p.ln_m) << ',' << (p.n2_over_k ? format_number(*p.n2_over_k) : std::string()) << ','
        << format_number(p.ratio_hitting) << ',' << format_number(p.ratio_mixing) << '\n';
  }
}

void write_runs_csv(const CampaignResult& result, std::ostream& out) {
  out << "point," << to_string(result.variable)
      << ",seed_index,seed,converged,rounds,initial_potential,final_potential,excess_walks\n";
  for (const auto& r : result.runs) {
    out << r.point << ',' << format_number(result.points.at(r.point).value) << ',' << r.seed_index << ',' << r.seed
        << ',' << (r.converged ? 1 : 0) << ',' << r.rounds << ',' << r.initial_potential << ',' << r.final_potential
        << ',' << r.excess_walks << '\n';
  }
}

Json campaign_points_json(const CampaignResult& result) {
  Json rows = Json::array();
  for (const auto& p : result.points) {
    Json row{{std::string(to_string(result.variable)), p.value},
             {"n", p.n},
             {"m", p.m},
             {"runs", p.runs},
             {"convergence_rate", p.convergence_rate},
             {"median_rounds", p.median_rounds},
             {"mean_rounds", p.mean_rounds},
             {"max_rounds", p.max_rounds},
             {"mean_excess_walks", p.mean_excess_walks},
             {"max_hitting", p.max_hitting},
             {"mix_time", p.mix_time},
             {"ln_m", p.ln_m},
             {"ratio_hitting", p.ratio_hitting},
             {"ratio_mixing", p.ratio_mixing}};
    row["n2_over_k"] = p.n2_over_k ? Json(*p.n2_over_k) : Json(nullptr);
    rows.push_back(std::move(row));
  }
  return rows;
}

Json campaign_summary_json(const CampaignResult& result, const Json& config, std::uint64_t master_seed) {
  bool all_converged = true;
  for (const auto& p : result.points) all_converged = all_converged && p.convergence_rate == 1.0;
  return Json{{"variable", to_string(result.variable)},
              {"points", result.points.size()},
              {"runs", result.runs.size()},
              {"all_converged", all_converged},
              {"seed", master_seed},
              {"config", config}};
}

void write_svg_chart(const CampaignResult& result, std::ostream& out, const std::string& title) {
  constexpr double width = 640, height = 400, left = 70, right = 20, top = 40, bottom = 50;
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : result.points)
    if (p.value > 0) pts.emplace_back(std::log10(p.value), p.median_rounds);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";
  if (!pts.empty()) {
    auto [xmin_it, xmax_it] = std::minmax_element(pts.begin(), pts.end());
    double xmin = xmin_it->first, xmax = xmax_it->first;
    double ymax = 0;
    for (auto& p : pts) ymax = std::max(ymax, p.second);
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == 0) ymax = 1;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (width - left - right); };
    auto sy = [&](double y) { return height - bottom - y / ymax * (height - top - bottom); };
    out << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
        << height - bottom << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
        << "\" stroke=\"black\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (auto& p : pts) out << format_number(sx(p.first)) << ',' << format_number(sy(p.second)) << ' ';
    out << "\"/>\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      out << "<circle cx=\"" << format_number(sx(pts[i].first)) << "\" cy=\"" << format_number(sy(pts[i].second))
          << "\" r=\"3\" fill=\"steelblue\"/>\n";
      out << "<text x=\"" << format_number(sx(pts[i].first)) << "\" y=\"" << height - bottom + 16
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
          << format_number(std::pow(10.0, pts[i].first)) << "</text>\n";
    }
    out << "<text x=\"" << left - 6 << "\" y=\"" << top + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << format_number(ymax) << "</text>\n";
  }
  out << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << to_string(result.variable)
      << " (log scale)</text>\n";
  out << "<text x=\"16\" y=\"" << height / 2 << "\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
      << height / 2 << ")\">median rounds</text>\n";
  out << "</svg>\n";
}

}  // namespace tlb::io
