/* C API for the ssmix shared library: exact list-coloring marginals,
 * self-avoiding-walk cutset certificates and the experiment drivers.
 *
 * Conventions:
 *  - every fallible call returns ssmix_status; SSMIX_OK is 0;
 *  - on failure, ssmix_last_error() describes the most recent error in the
 *    calling thread;
 *  - objects returned through ** out-parameters are owned by the caller and
 *    released with the matching _free function;
 *  - strings returned through char** are malloc'd; release with
 *    ssmix_string_free;
 *  - vertices are 0-based, colors are 1-based;
 *  - experiment entry points take a JSON configuration object (unknown keys
 *    rejected) and write their artifact to a path; identical configurations
 *    produce byte-identical artifacts.
 */
#ifndef SSMIX_H
#define SSMIX_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SSMIX_API __declspec(dllexport)
#else
#define SSMIX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ssmix_status {
    SSMIX_OK = 0,
    SSMIX_ERR_INVALID_ARGUMENT = 1,
    SSMIX_ERR_PARSE = 2,
    SSMIX_ERR_IO = 3,
    SSMIX_ERR_INFEASIBLE = 4,
    SSMIX_ERR_BUDGET_EXCEEDED = 5,
    SSMIX_ERR_NO_CUTSET = 6,
    SSMIX_ERR_BLOCK_SPANS_GRAPH = 7,
    SSMIX_ERR_NO_INITIAL_COLORING = 8,
    SSMIX_ERR_CHECK_FAILED = 9,
    SSMIX_ERR_INTERNAL = 10
} ssmix_status;

SSMIX_API const char* ssmix_status_name(ssmix_status status);
/* Message of the last failure in this thread; empty string if none. */
SSMIX_API const char* ssmix_last_error(void);

SSMIX_API void ssmix_string_free(char* text);

/* ---------------- graphs ---------------- */

typedef struct ssmix_graph ssmix_graph;

/* Erdos-Renyi G(n, avg_degree/n); deterministic in seed. */
SSMIX_API ssmix_status ssmix_graph_gnp(uint32_t n, double avg_degree, uint64_t seed,
                                       ssmix_graph** out);
SSMIX_API ssmix_status ssmix_graph_from_text(const char* text, ssmix_graph** out);
SSMIX_API ssmix_status ssmix_graph_to_text(const ssmix_graph* g, char** out_text);
SSMIX_API ssmix_status ssmix_graph_read(const char* path, ssmix_graph** out);
SSMIX_API ssmix_status ssmix_graph_write(const ssmix_graph* g, const char* path);
SSMIX_API ssmix_status ssmix_graph_counts(const ssmix_graph* g, uint32_t* out_n, uint64_t* out_m);
SSMIX_API void ssmix_graph_free(ssmix_graph* g);

/* ---------------- list-coloring instances ---------------- */

typedef struct ssmix_instance ssmix_instance;

/* Every vertex gets the full palette {1..q}. */
SSMIX_API ssmix_status ssmix_instance_q_coloring(const ssmix_graph* g, uint32_t q,
                                                 ssmix_instance** out);
/* Path of path_length vertices, each with q-2 pendants pinned to the colors
 * 3..q: an instance whose correlations do not decay with distance. */
SSMIX_API ssmix_status ssmix_instance_frozen_path_gadget(uint32_t path_length, uint32_t q,
                                                         ssmix_instance** out);
SSMIX_API ssmix_status ssmix_instance_from_text(const char* text, ssmix_instance** out);
SSMIX_API ssmix_status ssmix_instance_to_text(const ssmix_instance* inst, char** out_text);
SSMIX_API ssmix_status ssmix_instance_read(const char* path, ssmix_instance** out);
SSMIX_API ssmix_status ssmix_instance_write(const ssmix_instance* inst, const char* path);
SSMIX_API ssmix_status ssmix_instance_counts(const ssmix_instance* inst, uint32_t* out_n,
                                             uint64_t* out_m, uint32_t* out_q);
SSMIX_API void ssmix_instance_free(ssmix_instance* inst);

/* ---------------- exact oracle ---------------- */

/* Proper extensions of the conditioning (cond_len pairs vertex/color), as a
 * decimal string. */
SSMIX_API ssmix_status ssmix_count_extensions(const ssmix_instance* inst,
                                              const uint32_t* cond_vertices,
                                              const uint32_t* cond_colors, size_t cond_len,
                                              char** out_decimal);

/* Exact marginal of vertex v given the conditioning; out_probs must hold q
 * doubles (index color-1). Infeasible conditionings fail with
 * SSMIX_ERR_INFEASIBLE. */
SSMIX_API ssmix_status ssmix_exact_marginal(const ssmix_instance* inst, uint32_t v,
                                            const uint32_t* cond_vertices,
                                            const uint32_t* cond_colors, size_t cond_len,
                                            double* out_probs);

/* Same marginal as exact rationals, one "color num/den" line per palette
 * color. */
SSMIX_API ssmix_status ssmix_exact_marginal_text(const ssmix_instance* inst, uint32_t v,
                                                 const uint32_t* cond_vertices,
                                                 const uint32_t* cond_colors, size_t cond_len,
                                                 char** out_text);

/* ---------------- SAW tree / cutset report ---------------- */

/* Builds the self-avoiding-walk tree from `root` to depth 2t, searches the
 * permissive cutset in the window [t, 2t) with respect to the vertex set
 * `delta`, and returns a text report: the indented tree (cutset nodes marked
 * [S]) followed by "cutset_size", "decay_bound" and "node_count" lines.
 * Fails with SSMIX_ERR_NO_CUTSET when no cutset exists. */
SSMIX_API ssmix_status ssmix_saw_report(const ssmix_instance* inst, uint32_t root, uint32_t t,
                                        const uint32_t* delta, size_t delta_len,
                                        uint64_t node_cap, char** out_text);

/* ---------------- experiment drivers ---------------- */

/* Correlation-decay measurement; writes a CSV artifact. */
SSMIX_API ssmix_status ssmix_run_decay(const char* config_json, const char* out_path);
/* Cutset existence frequency over seeds; writes a CSV artifact. */
SSMIX_API ssmix_status ssmix_run_cutset_sweep(const char* config_json, const char* out_path);
/* Randomized lemma-check corpus; writes a JSON-lines artifact and reports the
 * number of failed checks (the call itself succeeds unless the run aborts). */
SSMIX_API ssmix_status ssmix_run_lemma_corpus(const char* config_json, const char* out_path,
                                              uint32_t* out_checks, uint32_t* out_failures);
/* Expectation table for the truncated-reciprocal kernel; CSV artifact. */
SSMIX_API ssmix_status ssmix_run_fq_table(const char* config_json, const char* out_path);
/* Glauber-dynamics cross-validation of the exact marginals; CSV artifact plus
 * the number of instances whose sampled marginal missed the tolerance. */
SSMIX_API ssmix_status ssmix_run_glauber_check(const char* config_json, const char* out_path,
                                               uint32_t* out_failures);

#ifdef __cplusplus
}
#endif

#endif /* SSMIX_H */
