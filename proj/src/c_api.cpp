#include "tlb/tlb.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <new>
#include <span>
#include <sstream>
#include <string>

#include "tlb/error.hpp"
#include "tlb/experiments.hpp"
#include "tlb/graph.hpp"
#include "tlb/io.hpp"
#include "tlb/spectral.hpp"
#include "tlb/verify.hpp"

struct tlb_graph {
  tlb::Graph graph;
};

namespace {

namespace fs = std::filesystem;
using tlb::io::Json;

thread_local std::string last_error;

tlb_status to_status(tlb::ErrorCode code) {
  switch (code) {
    case tlb::ErrorCode::invalid_argument: return TLB_ERR_INVALID_ARGUMENT;
    case tlb::ErrorCode::infeasible: return TLB_ERR_INFEASIBLE;
    case tlb::ErrorCode::io: return TLB_ERR_IO;
    case tlb::ErrorCode::numeric: return TLB_ERR_NUMERIC;
    case tlb::ErrorCode::internal: break;
  }
  return TLB_ERR_INTERNAL;
}

// Runs `fn`, translating every exception into a status and last_error.
template <class Fn>
tlb_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return TLB_OK;
  } catch (const tlb::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const Json::exception& e) {
    last_error = std::string("invalid JSON value: ") + e.what();
    return TLB_ERR_INVALID_ARGUMENT;
  } catch (const fs::filesystem_error& e) {
    last_error = e.what();
    return TLB_ERR_IO;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return TLB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return TLB_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return TLB_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) tlb::fail(tlb::ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

fs::path prepare_out_dir(const char* out_dir) {
  need(out_dir, "out_dir");
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  return dir;
}

fs::path base_of(const char* config_path) { return fs::absolute(fs::path(config_path)).parent_path(); }

void write_stream(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ostringstream os;
  body(os);
  tlb::io::write_text_file(path, os.str());
}

void write_json(const fs::path& path, const Json& j) { tlb::io::write_text_file(path, j.dump(2) + "\n"); }

Json runs_json(const tlb::CampaignResult& r) {
  Json rows = Json::array();
  for (const auto& run : r.runs)
    rows.push_back({{"point", run.point},
                    {std::string(tlb::to_string(r.variable)), r.points.at(run.point).value},
                    {"seed_index", run.seed_index},
                    {"seed", run.seed},
                    {"converged", run.converged},
                    {"rounds", run.rounds},
                    {"initial_potential", run.initial_potential},
                    {"final_potential", run.final_potential},
                    {"excess_walks", run.excess_walks}});
  return rows;
}

void write_campaign(const fs::path& dir, const std::string& stem, const tlb::CampaignResult& r, tlb_format format,
                    const std::string& title) {
  if (format == TLB_FORMAT_JSON) {
    write_json(dir / (stem + ".json"), tlb::io::campaign_points_json(r));
    write_json(dir / "runs.json", runs_json(r));
  } else {
    write_stream(dir / (stem + ".csv"), [&](std::ostream& os) { tlb::io::write_campaign_csv(r, os); });
    write_stream(dir / "runs.csv", [&](std::ostream& os) { tlb::io::write_runs_csv(r, os); });
  }
  write_stream(dir / (stem + ".svg"), [&](std::ostream& os) { tlb::io::write_svg_chart(r, os, title); });
}

void check_format(tlb_format format) {
  if (format != TLB_FORMAT_CSV && format != TLB_FORMAT_JSON)
    tlb::fail(tlb::ErrorCode::invalid_argument, "format must be csv or json");
}

}  // namespace

extern "C" {

const char* tlb_last_error(void) { return last_error.c_str(); }

const char* tlb_version(void) { return "0.1.0"; }

const char* tlb_status_name(tlb_status status) {
  switch (status) {
    case TLB_OK: return "ok";
    case TLB_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case TLB_ERR_INFEASIBLE: return "infeasible";
    case TLB_ERR_IO: return "io";
    case TLB_ERR_NUMERIC: return "numeric";
    case TLB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void tlb_string_free(char* s) { std::free(s); }

tlb_status tlb_graph_generate(const char* kind, const int64_t* params, size_t param_count, uint64_t seed,
                              tlb_graph** out) {
  return guarded([&] {
    need(kind, "kind");
    need(out, "out");
    if (param_count) need(params, "params");
    std::span<const std::int64_t> p(params, param_count);
    *out = new tlb_graph{tlb::generate(std::string_view(kind), p, seed)};
  });
}

tlb_status tlb_graph_from_recipe(const char* recipe_path, uint64_t seed, tlb_graph** out) {
  return guarded([&] {
    need(recipe_path, "recipe_path");
    need(out, "out");
    Json j = tlb::io::read_json_file(recipe_path);
    if (j.is_object() && !j.contains("file") && !j.contains("seed")) j["seed"] = seed;
    *out = new tlb_graph{tlb::build_graph(tlb::io::graph_recipe_from_json(j, base_of(recipe_path)))};
  });
}

tlb_status tlb_graph_load(const char* edge_list_path, tlb_graph** out) {
  return guarded([&] {
    need(edge_list_path, "edge_list_path");
    need(out, "out");
    *out = new tlb_graph{tlb::load_edge_list(edge_list_path)};
  });
}

tlb_status tlb_graph_save(const tlb_graph* g, const char* edge_list_path) {
  return guarded([&] {
    need(g, "graph");
    need(edge_list_path, "edge_list_path");
    tlb::save_edge_list(g->graph, edge_list_path);
  });
}

void tlb_graph_free(tlb_graph* g) { delete g; }

size_t tlb_graph_node_count(const tlb_graph* g) { return g ? g->graph.node_count() : 0; }
size_t tlb_graph_edge_count(const tlb_graph* g) { return g ? g->graph.edge_count() : 0; }
int tlb_graph_is_bipartite(const tlb_graph* g) { return g && tlb::is_bipartite(g->graph).bipartite ? 1 : 0; }

tlb_status tlb_graph_spectral_gap(const tlb_graph* g, double* mu) {
  return guarded([&] {
    need(g, "graph");
    need(mu, "mu");
    *mu = tlb::spectral_gap(g->graph);
  });
}

tlb_status tlb_graph_mixing_time(const tlb_graph* g, uint64_t* mix) {
  return guarded([&] {
    need(g, "graph");
    need(mix, "mix");
    *mix = tlb::mixing_time(g->graph);
  });
}

tlb_status tlb_graph_max_hitting(const tlb_graph* g, double* h) {
  return guarded([&] {
    need(g, "graph");
    need(h, "h");
    *h = tlb::max_entry(tlb::hitting_times(g->graph));
  });
}

tlb_status tlb_graph_analyze_json(const tlb_graph* g, char** json_out) {
  return guarded([&] {
    need(g, "graph");
    need(json_out, "json_out");
    *json_out = duplicate(tlb::io::analysis_json(g->graph, tlb::analyze(g->graph)).dump());
  });
}

tlb_status tlb_simulate(const char* config_path, uint64_t seed, const char* out_dir, tlb_format format,
                        tlb_run_summary* summary) {
  return guarded([&] {
    need(config_path, "config_path");
    check_format(format);
    const Json config = tlb::io::read_json_file(config_path);
    const auto cfg = tlb::io::simulation_from_json(config, base_of(config_path));
    const fs::path dir = prepare_out_dir(out_dir);
    const auto trace = tlb::simulate(cfg, seed);
    if (format == TLB_FORMAT_JSON)
      write_json(dir / "trace.json", Json{{"rows", tlb::io::trace_rows_json(trace)}});
    else
      write_stream(dir / "trace.csv", [&](std::ostream& os) { tlb::io::write_trace_csv(trace, os); });
    write_json(dir / "summary.json", tlb::io::run_summary_json(trace, config));
    if (summary)
      *summary = tlb_run_summary{trace.converged ? 1 : 0, trace.rounds, trace.initial_potential, trace.final_potential};
  });
}

tlb_status tlb_sweep(const char* config_path, uint64_t master_seed, const char* out_dir, tlb_format format,
                     int* all_converged) {
  return guarded([&] {
    need(config_path, "config_path");
    check_format(format);
    const Json config = tlb::io::read_json_file(config_path);
    const auto campaign = tlb::io::campaign_from_json(config, base_of(config_path), master_seed);
    const fs::path dir = prepare_out_dir(out_dir);
    const auto result = tlb::run_campaign(campaign);
    write_campaign(dir, "sweep", result, format, "median rounds vs " + std::string(tlb::to_string(result.variable)));
    const Json summary = tlb::io::campaign_summary_json(result, config, master_seed);
    write_json(dir / "summary.json", summary);
    if (all_converged) *all_converged = summary.at("all_converged").get<bool>() ? 1 : 0;
  });
}

tlb_status tlb_lower_bound(const char* config_path, uint64_t master_seed, const char* out_dir, tlb_format format,
                           double* rank_correlation) {
  return guarded([&] {
    check_format(format);
    Json config = Json::object();
    tlb::io::LowerBoundConfig lb;
    if (config_path) {
      config = tlb::io::read_json_file(config_path);
      lb = tlb::io::lower_bound_from_json(config);
    } else {
      lb.k = {1, 2, 5, 10};
    }
    const fs::path dir = prepare_out_dir(out_dir);
    const auto r = tlb::lower_bound_experiment(lb.n, lb.eps, lb.k, lb.m, lb.seeds, master_seed, lb.max_rounds);
    write_campaign(dir, "lower_bound", r.campaign, format, "median rounds vs cross edges k");
    Json summary = tlb::io::campaign_summary_json(r.campaign, config, master_seed);
    summary["rank_correlation"] = r.rank_correlation;
    summary["parameters"] = {{"n", lb.n}, {"eps", lb.eps}, {"k", lb.k},
                             {"m", lb.m}, {"seeds", lb.seeds}, {"max_rounds", lb.max_rounds}};
    write_json(dir / "summary.json", summary);
    if (rank_correlation) *rank_correlation = r.rank_correlation;
  });
}

tlb_status tlb_verify(uint64_t seed, tlb_suite_callback callback, void* user, int* all_passed) {
  return guarded([&] {
    bool ok = true;
    tlb::run_verify(seed, [&](const tlb::SuiteReport& rep) {
      ok = ok && rep.pass;
      if (callback) callback(rep.name.c_str(), rep.pass ? 1 : 0, rep.detail.c_str(), rep.seconds, user);
    });
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

}  // extern "C"
