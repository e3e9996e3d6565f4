/* C interface to the threshold load balancing library. */
#ifndef TLB_TLB_H
#define TLB_TLB_H

#include <stddef.h>
#include <stdint.h>

#if defined(TLB_BUILDING_LIBRARY)
#define TLB_API __attribute__((visibility("default")))
#else
#define TLB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tlb_status {
  TLB_OK = 0,
  TLB_ERR_INVALID_ARGUMENT = 1,
  TLB_ERR_INFEASIBLE = 2,
  TLB_ERR_IO = 3,
  TLB_ERR_NUMERIC = 4,
  TLB_ERR_INTERNAL = 5
} tlb_status;

typedef enum tlb_format { TLB_FORMAT_CSV = 0, TLB_FORMAT_JSON = 1 } tlb_format;

typedef struct tlb_graph tlb_graph;

/* Message of the last failed call on this thread; "" if none. */
TLB_API const char* tlb_last_error(void);
TLB_API const char* tlb_version(void);
TLB_API const char* tlb_status_name(tlb_status status);

/* Strings returned through char** out-parameters are released with tlb_string_free. */
TLB_API void tlb_string_free(char* s);

/* ---- graphs ---- */

TLB_API tlb_status tlb_graph_generate(const char* kind, const int64_t* params, size_t param_count, uint64_t seed,
                                      tlb_graph** out);
/* Graph recipe JSON: {"kind", "params", "seed"} or {"file"}. A missing seed takes `seed`. */
TLB_API tlb_status tlb_graph_from_recipe(const char* recipe_path, uint64_t seed, tlb_graph** out);
TLB_API tlb_status tlb_graph_load(const char* edge_list_path, tlb_graph** out);
TLB_API tlb_status tlb_graph_save(const tlb_graph* g, const char* edge_list_path);
TLB_API void tlb_graph_free(tlb_graph* g);

TLB_API size_t tlb_graph_node_count(const tlb_graph* g);
TLB_API size_t tlb_graph_edge_count(const tlb_graph* g);
TLB_API int tlb_graph_is_bipartite(const tlb_graph* g);

TLB_API tlb_status tlb_graph_spectral_gap(const tlb_graph* g, double* mu);
TLB_API tlb_status tlb_graph_mixing_time(const tlb_graph* g, uint64_t* mix);
TLB_API tlb_status tlb_graph_max_hitting(const tlb_graph* g, double* h);
/* {n, edges, bipartite, pi, mu, mix_time, max_hitting} */
TLB_API tlb_status tlb_graph_analyze_json(const tlb_graph* g, char** json_out);

/* ---- runs and campaigns; every file goes into out_dir (created if missing) ---- */

typedef struct tlb_run_summary {
  int converged;
  uint64_t rounds;
  int64_t initial_potential;
  int64_t final_potential;
} tlb_run_summary;

/* Writes trace.csv or trace.json, and summary.json. */
TLB_API tlb_status tlb_simulate(const char* config_path, uint64_t seed, const char* out_dir, tlb_format format,
                                tlb_run_summary* summary);

/* Writes sweep.csv or sweep.json, runs.csv or runs.json, summary.json and sweep.svg. */
TLB_API tlb_status tlb_sweep(const char* config_path, uint64_t master_seed, const char* out_dir, tlb_format format,
                             int* all_converged);

/* Two-clique lower-bound sweep over k. config_path may be NULL for the defaults
   (n=20, eps=0.25, m=2000, k in {1,2,5,10}, 20 seeds). Writes lower_bound.csv or
   lower_bound.json, runs.csv or runs.json, summary.json and lower_bound.svg. */
TLB_API tlb_status tlb_lower_bound(const char* config_path, uint64_t master_seed, const char* out_dir,
                                   tlb_format format, double* rank_correlation);

/* ---- built-in property suites ---- */

typedef void (*tlb_suite_callback)(const char* name, int passed, const char* detail, double seconds, void* user);

TLB_API tlb_status tlb_verify(uint64_t seed, tlb_suite_callback callback, void* user, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
