// Command-line front end. Talks to the library only through tlb/tlb.h.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "tlb/tlb.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNotConverged = 2;

struct Flags {
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
  std::string format = "csv";
};

void add_flags(CLI::App* cmd, Flags& f, bool wants_out, bool wants_config, bool wants_format) {
  cmd->add_option("--seed", f.seed, "64-bit seed (default 0)");
  if (wants_out) cmd->add_option("--out", f.out, "output directory")->required();
  if (wants_config) cmd->add_option("--config", f.config, "input file")->required()->check(CLI::ExistingFile);
  if (wants_format) cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

int report(tlb_status st) {
  std::cerr << "error (" << tlb_status_name(st) << "): " << tlb_last_error() << '\n';
  return kExitInvalid;
}

tlb_format format_of(const Flags& f) { return f.format == "json" ? TLB_FORMAT_JSON : TLB_FORMAT_CSV; }

// A file starting with '{' is a graph recipe; anything else is an edge list.
tlb_status open_graph(const Flags& f, tlb_graph** g) {
  std::ifstream in(f.config);
  char first = 0;
  in >> std::ws;
  in.get(first);
  return first == '{' ? tlb_graph_from_recipe(f.config.c_str(), f.seed, g) : tlb_graph_load(f.config.c_str(), g);
}

int cmd_gen_graph(const Flags& f) {
  tlb_graph* g = nullptr;
  if (auto st = tlb_graph_from_recipe(f.config.c_str(), f.seed, &g); st != TLB_OK) return report(st);
  std::error_code ec;
  std::filesystem::create_directories(f.out, ec);
  const std::string path = (std::filesystem::path(f.out) / "graph.edges").string();
  const auto st = tlb_graph_save(g, path.c_str());
  std::cerr << "gen-graph: n=" << tlb_graph_node_count(g) << " edges=" << tlb_graph_edge_count(g) << " -> " << path
            << '\n';
  tlb_graph_free(g);
  return st == TLB_OK ? kExitOk : report(st);
}

int cmd_analyze(const Flags& f) {
  tlb_graph* g = nullptr;
  if (auto st = open_graph(f, &g); st != TLB_OK) return report(st);
  char* json = nullptr;
  const auto st = tlb_graph_analyze_json(g, &json);
  tlb_graph_free(g);
  if (st != TLB_OK) return report(st);
  std::cout << json << '\n';
  tlb_string_free(json);
  return kExitOk;
}

int cmd_simulate(const Flags& f) {
  tlb_run_summary s{};
  if (auto st = tlb_simulate(f.config.c_str(), f.seed, f.out.c_str(), format_of(f), &s); st != TLB_OK) return report(st);
  std::cerr << "simulate: " << (s.converged ? "converged" : "did not converge") << " after " << s.rounds
            << " rounds, potential " << s.initial_potential << " -> " << s.final_potential << '\n';
  return s.converged ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const Flags& f) {
  int all = 0;
  if (auto st = tlb_sweep(f.config.c_str(), f.seed, f.out.c_str(), format_of(f), &all); st != TLB_OK) return report(st);
  std::cerr << "sweep: " << (all ? "every run converged" : "some runs did not converge") << "; results in " << f.out
            << '\n';
  return kExitOk;
}

int cmd_lower_bound(const Flags& f) {
  double rho = 0.0;
  const char* cfg = f.config.empty() ? nullptr : f.config.c_str();
  if (auto st = tlb_lower_bound(cfg, f.seed, f.out.c_str(), format_of(f), &rho); st != TLB_OK) return report(st);
  std::cerr << "lower-bound: rank correlation(median rounds, n^2/k) = " << rho << "; results in " << f.out << '\n';
  return kExitOk;
}

void print_suite(const char* name, int passed, const char* detail, double seconds, void*) {
  std::cout << (passed ? "PASS " : "FAIL ") << name << ": " << detail << '\n' << std::flush;
  std::cerr << "  " << name << " took " << seconds << " s\n";
}

int cmd_verify(const Flags& f) {
  int all = 0;
  if (auto st = tlb_verify(f.seed, print_suite, nullptr, &all); st != TLB_OK) return report(st);
  std::cout << (all ? "all suites passed" : "some suites failed") << '\n';
  return all ? kExitOk : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threshold load balancing simulator"};
  app.require_subcommand(1);
  Flags f;

  auto* gen = app.add_subcommand("gen-graph", "write a generated graph as an edge list");
  add_flags(gen, f, true, true, false);
  auto* an = app.add_subcommand("analyze", "print random-walk quantities of a graph as JSON");
  add_flags(an, f, false, true, false);
  auto* sim = app.add_subcommand("simulate", "run one seeded simulation");
  add_flags(sim, f, true, true, true);
  auto* sw = app.add_subcommand("sweep", "run a campaign over one sweep variable");
  add_flags(sw, f, true, true, true);
  auto* lb = app.add_subcommand("lower-bound", "two-clique lower-bound campaign over k");
  add_flags(lb, f, true, false, true);
  lb->add_option("--config", f.config, "lower-bound parameters (JSON)")->check(CLI::ExistingFile);
  auto* ver = app.add_subcommand("verify", "run the built-in property suites");
  add_flags(ver, f, false, false, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  std::cerr << "seed: " << f.seed << '\n';
  if (*gen) return cmd_gen_graph(f);
  if (*an) return cmd_analyze(f);
  if (*sim) return cmd_simulate(f);
  if (*sw) return cmd_sweep(f);
  if (*lb) return cmd_lower_bound(f);
  return cmd_verify(f);
}
