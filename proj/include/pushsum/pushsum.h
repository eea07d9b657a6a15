/* C interface to the push-sum analysis library.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a pushsum_status; on
 * failure pushsum_last_error() describes the most recent error raised on the
 * calling thread. Handles are immutable after creation and may be shared
 * between threads.
 */
#ifndef PUSHSUM_PUSHSUM_H
#define PUSHSUM_PUSHSUM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(PUSHSUM_BUILDING_LIBRARY)
#define PUSHSUM_API __declspec(dllexport)
#else
#define PUSHSUM_API __declspec(dllimport)
#endif
#else
#define PUSHSUM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pushsum_status {
  PUSHSUM_OK = 0,
  PUSHSUM_CHECK_FAILED = 1,
  PUSHSUM_INVALID_INPUT = 2,
  PUSHSUM_CAPACITY = 3,
  PUSHSUM_NOT_CONVERGED = 4,
  PUSHSUM_PRECONDITION = 5,
  PUSHSUM_INTERNAL = 6
} pushsum_status;

typedef enum pushsum_model_kind {
  PUSHSUM_MODEL_REFERENCE = 0,
  PUSHSUM_MODEL_TWO_WAY = 1,
  PUSHSUM_MODEL_SLOWED = 2,
  PUSHSUM_MODEL_AVERAGING = 3,
  PUSHSUM_MODEL_CUSTOM = 4
} pushsum_model_kind;

typedef enum pushsum_primitivity {
  PUSHSUM_PRIMITIVE = 0,
  PUSHSUM_NOT_PRIMITIVE = 1,
  PUSHSUM_UNDETERMINED = 2
} pushsum_primitivity;

typedef struct pushsum_graph pushsum_graph;
typedef struct pushsum_model pushsum_model;

PUSHSUM_API const char* pushsum_version(void);
PUSHSUM_API const char* pushsum_last_error(void);
PUSHSUM_API const char* pushsum_status_name(pushsum_status status);
/* Child seed for (base, stream, index); SplitMix64 finalizer. */
PUSHSUM_API uint64_t pushsum_derive_seed(uint64_t base, uint64_t stream, uint64_t index);

/* ---- graphs ---- */

/* edges holds 2*edge_count node indices (i0 j0 i1 j1 ...). */
PUSHSUM_API pushsum_status pushsum_graph_create(size_t nodes, const size_t* edges, size_t edge_count,
                                                pushsum_graph** out);
PUSHSUM_API pushsum_status pushsum_graph_read(const char* path, pushsum_graph** out);
PUSHSUM_API pushsum_status pushsum_graph_write(const pushsum_graph* g, const char* path);
/* Giant component of the interpolated geometric graph; radius may be NULL. */
PUSHSUM_API pushsum_status pushsum_graph_rgg(size_t p0, double c, uint64_t seed, double target_fraction,
                                             pushsum_graph** out, double* radius);
/* p-cycle plus the first `prefix` of `extra_edges` random extra edges. */
PUSHSUM_API pushsum_status pushsum_graph_cycle_growth(size_t p, size_t extra_edges, uint64_t seed, size_t prefix,
                                                      pushsum_graph** out);
PUSHSUM_API void pushsum_graph_free(pushsum_graph* g);
PUSHSUM_API size_t pushsum_graph_node_count(const pushsum_graph* g);
PUSHSUM_API size_t pushsum_graph_edge_count(const pushsum_graph* g);
PUSHSUM_API int pushsum_graph_connected(const pushsum_graph* g);
/* Writes min(capacity, 2*edge_count) indices, edges sorted with i < j. */
PUSHSUM_API pushsum_status pushsum_graph_edges(const pushsum_graph* g, size_t* out, size_t capacity);

/* ---- models ---- */

PUSHSUM_API pushsum_status pushsum_model_kind_parse(const char* name, pushsum_model_kind* out);
PUSHSUM_API const char* pushsum_model_kind_name(pushsum_model_kind kind);
PUSHSUM_API pushsum_status pushsum_model_create(const pushsum_graph* g, pushsum_model_kind kind,
                                                pushsum_model** out);
/* count atoms of size p x p, row-major, stored back to back. */
PUSHSUM_API pushsum_status pushsum_model_from_atoms(size_t p, size_t count, const double* probabilities,
                                                    const double* matrices, int steps_per_time_unit,
                                                    pushsum_model** out);
PUSHSUM_API void pushsum_model_free(pushsum_model* m);
PUSHSUM_API size_t pushsum_model_size(const pushsum_model* m);
PUSHSUM_API int pushsum_model_steps_per_time_unit(const pushsum_model* m);
PUSHSUM_API pushsum_model_kind pushsum_model_get_kind(const pushsum_model* m);

/* ---- assumption checks ---- */

typedef struct pushsum_assumption_report {
  int all_allowable;
  pushsum_primitivity support_primitive;
  int mean_irreducible;
  int positive_diagonal_as;
  int log_moment_finite;
  double min_positive_entry;
  double expected_log_alpha;
  int all_pass;
} pushsum_assumption_report;

/* cap = 0 selects the default closure cap. */
PUSHSUM_API pushsum_status pushsum_check_assumption(const pushsum_model* m, size_t cap,
                                                    pushsum_assumption_report* out);
/* count patterns of size p x p, bytes row-major, nonzero = set. */
PUSHSUM_API pushsum_status pushsum_patterns_primitive(size_t p, size_t count, const unsigned char* bits, size_t cap,
                                                      pushsum_primitivity* out);

/* ---- spectral bounds ---- */

/* eta_{2k}; -inf for p = 1. Returns PUSHSUM_NOT_CONVERGED with *value set
 * to the best estimate when the solver did not converge. */
PUSHSUM_API pushsum_status pushsum_eta(const pushsum_model* m, unsigned k, double* value);

typedef struct pushsum_bound {
  double eta2;
  double eta2_half;
  double time_normalized_bound;
  int converged;
} pushsum_bound;

PUSHSUM_API pushsum_status pushsum_bound_report(const pushsum_model* m, pushsum_bound* out);

PUSHSUM_API pushsum_status pushsum_check_eta_convexity(const pushsum_model* m, unsigned kmax, int* holds,
                                                       double* worst_margin);
/* Joint distribution of (X, Y): count atoms, X atoms dx x dx and Y atoms
 * dy x dy, row-major back to back. */
PUSHSUM_API pushsum_status pushsum_cs_tensor_check(size_t count, const double* probabilities, size_t dx,
                                                   const double* xs, size_t dy, const double* ys, int* holds,
                                                   double* slack);
PUSHSUM_API pushsum_status pushsum_moment_bound_doubly_stochastic(const pushsum_model* m, unsigned k,
                                                                  double* value);

/* ---- simulation ---- */

typedef struct pushsum_trial_result {
  double empirical_rate;
  double bound_eta2_half;
  double bound_minus_empirical;
  double weight_diag;
  double readout_error;
  uint64_t n;
  uint64_t seed;
  size_t p;
  size_t warning_count;
} pushsum_trial_result;

/* bound may be NULL (computed) or point at a precomputed time-normalised
 * bound; x0 may be NULL (first column of I - J) or hold p values. */
PUSHSUM_API pushsum_status pushsum_run_trial(const pushsum_model* m, uint64_t n, uint64_t seed, const double* bound,
                                             const double* x0, pushsum_trial_result* out);

#ifdef __cplusplus
}
#endif

#endif /* PUSHSUM_PUSHSUM_H */
