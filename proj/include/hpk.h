/* hpk - hybrid program toolkit.
 *
 * C interface to the model/graph parsers, the two activity-graph
 * transformations, the simulator and falsification checker, the discrete
 * reachability oracle, the structural differ and the bundled example models.
 *
 * Conventions:
 *   - Handles are opaque; release them with the matching *_free function.
 *   - Functions returning hpk_status set *err to a malloc'd message on
 *     failure (release with hpk_string_free); out-parameters are only valid
 *     on HPK_OK.
 *   - Returned char* strings are malloc'd and owned by the caller.
 */
#ifndef HPK_H
#define HPK_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct hpk_model hpk_model;
typedef struct hpk_graph hpk_graph;
typedef struct hpk_trace hpk_trace;
typedef struct hpk_check hpk_check;
typedef struct hpk_box hpk_box;

typedef enum hpk_status {
    HPK_OK = 0,
    HPK_ERR_SYNTAX = 1,
    HPK_ERR_UNDECLARED = 2,
    HPK_ERR_CONSTANT_WRITTEN = 3,
    HPK_ERR_GRAPH = 4,              /* dangling edge, duplicate id, malformed */
    HPK_ERR_NOT_WELL_STRUCTURED = 5,
    HPK_ERR_EVAL = 6,               /* unbound variable, division by zero, ... */
    HPK_ERR_SIMULATION = 7,         /* placeholder executed, init unsat, ... */
    HPK_ERR_BAD_ARGUMENT = 8,
    HPK_ERR_UNKNOWN_NAME = 9,
    HPK_ERR_KIND_MISMATCH = 10,
    HPK_ERR_INTERNAL = 11
} hpk_status;

typedef enum hpk_verdict {
    HPK_NO_COUNTEREXAMPLE = 0,
    HPK_COUNTEREXAMPLE = 1,
    HPK_WITNESS_FOUND = 2,
    HPK_NO_WITNESS_FOUND = 3
} hpk_verdict;

typedef enum hpk_input_kind {
    HPK_INPUT_MODEL = 0,
    HPK_INPUT_GRAPH = 1,
    HPK_INPUT_UNKNOWN = 2
} hpk_input_kind;

/* Mirrors the simulator policy; hpk_policy_init fills in the defaults. */
typedef struct hpk_policy {
    uint64_t seed;
    double assign_any_lo;
    double assign_any_hi;
    int assign_any_retries;
    int max_star_iterations;
    double ode_step;
    double ode_max_duration;
    double event_tolerance;
} hpk_policy;

const char* hpk_version(void);
void hpk_string_free(char* s);
void hpk_policy_init(hpk_policy* policy);

/* ---- parsing and printing ---- */

hpk_input_kind hpk_sniff(const char* text);

hpk_status hpk_model_parse(const char* text, hpk_model** out, char** err);
hpk_status hpk_graph_parse(const char* text, hpk_graph** out, char** err);
void hpk_model_free(hpk_model* m);
void hpk_graph_free(hpk_graph* g);

char* hpk_model_format(const hpk_model* m);
char* hpk_graph_format(const hpk_graph* g);
const char* hpk_model_name(const hpk_model* m);
const char* hpk_graph_name(const hpk_graph* g);

/* ---- transformations ---- */

hpk_status hpk_to_hybrid_program(const hpk_graph* g, hpk_model** out, char** err);
hpk_status hpk_to_automaton_embedding(const hpk_graph* g, hpk_model** out, char** err);

/* ---- simulation and checking ---- */

hpk_box* hpk_box_new(void);
void hpk_box_set(hpk_box* box, const char* var, double lo, double hi);
void hpk_box_free(hpk_box* box);

/* box may be NULL. */
hpk_status hpk_simulate(const hpk_model* m, const hpk_policy* policy, const hpk_box* box,
                        hpk_trace** out, char** err);
void hpk_trace_free(hpk_trace* t);
char* hpk_trace_csv(const hpk_trace* t);
int hpk_trace_sample_count(const hpk_trace* t);

hpk_status hpk_check_safety(const hpk_model* m, int runs, const hpk_policy* policy,
                            const hpk_box* box, hpk_check** out, char** err);
hpk_status hpk_check_diamond(const hpk_model* m, int runs, const hpk_policy* policy,
                             const hpk_box* box, hpk_check** out, char** err);
void hpk_check_free(hpk_check* c);
hpk_verdict hpk_check_verdict(const hpk_check* c);
int hpk_check_runs_executed(const hpk_check* c);
/* Borrowed reference, valid while the check lives; NULL when no trace. */
const hpk_trace* hpk_check_trace(const hpk_check* c);
/* Violation time and formula; formula is NULL when there is none. */
double hpk_check_violation_time(const hpk_check* c);
char* hpk_check_violation_formula(const hpk_check* c);

/* ---- discrete reachability ---- */

/* Enumerates the exact reachable end states of the model's program over the
 * given finite value set, starting from every valuation over the declared
 * names that satisfies the init formula. Returns a printed state set, one
 * state per line. */
hpk_status hpk_reach(const hpk_model* m, const double* values, int value_count, int star_depth,
                     char** out, char** err);

/* ---- structural diff ---- */

/* Reports differences between two models or two graphs; entry_count receives
 * the number of difference entries. tsv selects the tab-separated format. */
hpk_status hpk_diff_models(const hpk_model* a, const hpk_model* b, int tsv, char** report,
                           int* entry_count, char** err);
hpk_status hpk_diff_graphs(const hpk_graph* a, const hpk_graph* b, int tsv, char** report,
                           int* entry_count, char** err);

/* ---- bundled example models ---- */

int hpk_corpus_count(void);
const char* hpk_corpus_name(int index);
/* 1 when the entry is an activity graph, 0 when it is a model. */
int hpk_corpus_is_graph(const char* name);
const char* hpk_corpus_filename(const char* name);
char* hpk_corpus_description(const char* name);
hpk_status hpk_corpus_model(const char* name, hpk_model** out, char** err);
hpk_status hpk_corpus_graph(const char* name, hpk_graph** out, char** err);
/* The entry's initial-state sampling box (possibly empty). */
hpk_status hpk_corpus_box(const char* name, hpk_box** out, char** err);

#ifdef __cplusplus
}
#endif

#endif /* HPK_H */
