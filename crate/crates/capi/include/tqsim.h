#ifndef TQSIM_H
#define TQSIM_H

/* Generated by cbindgen from the tqsim-capi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum {
  TQSIM_OK = 0,
  TQSIM_ERR_INVALID_ARGUMENT = 1,
  TQSIM_ERR_PARSE = 2,
  TQSIM_ERR_CAPACITY = 3,
  TQSIM_ERR_NULL_POINTER = 4,
  TQSIM_ERR_UTF8 = 5,
  TQSIM_ERR_INTERNAL = 6,
} tqsim_status;

/**
 * An immutable parsed circuit.
 */
typedef struct tqsim_circuit tqsim_circuit;

/**
 * An immutable validated noise model.
 */
typedef struct tqsim_noise_model tqsim_noise_model;

/**
 * Results of a completed run.
 */
typedef struct tqsim_result tqsim_result;

/**
 * Scalar options for a run; zero-initialize and fill what you need.
 * `mem_budget_bytes == 0` selects the default budget, and
 * `copy_cost_gates <= 0` the default planning copy cost.
 */
typedef struct {
  uint64_t shots;
  uint64_t seed;
  uint64_t mem_budget_bytes;
  double copy_cost_gates;
} tqsim_run_options;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. Valid until the next
 * failing call on the same thread; never null.
 */
const char *tqsim_last_error_message(void);

/**
 * Parse an OpenQASM 2.0 program. On success `*out` owns the circuit.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` must be writable.
 */
tqsim_status tqsim_circuit_parse_qasm(const char *text, tqsim_circuit **out);

/**
 * Number of qubits in the circuit.
 *
 * # Safety
 * `circuit` must be a live pointer from this library; `out` writable.
 */
tqsim_status tqsim_circuit_n_qubits(const tqsim_circuit *circuit, uint32_t *out);

/**
 * Number of gates in the circuit.
 *
 * # Safety
 * `circuit` must be a live pointer from this library; `out` writable.
 */
tqsim_status tqsim_circuit_n_gates(const tqsim_circuit *circuit, uint64_t *out);

/**
 * Release a circuit handle. Null is ignored.
 *
 * # Safety
 * `circuit` must be null or a pointer previously returned by this library,
 * released at most once.
 */
void tqsim_circuit_free(tqsim_circuit *circuit);

/**
 * Build a noise model from its JSON document.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string; `out` must be writable.
 */
tqsim_status tqsim_noise_model_from_json(const char *json, tqsim_noise_model **out);

/**
 * A noise-free model (ideal simulation).
 *
 * # Safety
 * `out` must be writable.
 */
tqsim_status tqsim_noise_model_ideal(tqsim_noise_model **out);

/**
 * Release a noise-model handle. Null is ignored.
 *
 * # Safety
 * `model` must be null or a pointer previously returned by this library,
 * released at most once.
 */
void tqsim_noise_model_free(tqsim_noise_model *model);

/**
 * Flat baseline run: `shots` independent full-circuit trajectories.
 *
 * # Safety
 * All pointers must be valid; see the crate docs.
 */
tqsim_status tqsim_run_baseline(const tqsim_circuit *circuit,
                                const tqsim_noise_model *model,
                                const tqsim_run_options *options,
                                tqsim_result **out);

/**
 * Tree run with a planner-chosen structure.
 *
 * # Safety
 * All pointers must be valid; see the crate docs.
 */
tqsim_status tqsim_run_tree(const tqsim_circuit *circuit,
                            const tqsim_noise_model *model,
                            const tqsim_run_options *options,
                            tqsim_result **out);

/**
 * Tree run with explicit per-level arities (slice boundaries are chosen
 * near-equal). `arities` points at `n_arities` entries whose product must
 * be at least `options->shots`.
 *
 * # Safety
 * All pointers must be valid; `arities` must point at `n_arities` entries.
 */
tqsim_status tqsim_run_tree_with_arities(const tqsim_circuit *circuit,
                                         const tqsim_noise_model *model,
                                         const tqsim_run_options *options,
                                         const uint64_t *arities,
                                         size_t n_arities,
                                         tqsim_result **out);

/**
 * Baseline and tree in one call, reporting the measured speedup.
 *
 * # Safety
 * All pointers must be valid; see the crate docs.
 */
tqsim_status tqsim_run_both(const tqsim_circuit *circuit,
                            const tqsim_noise_model *model,
                            const tqsim_run_options *options,
                            tqsim_result **out);

/**
 * Plan a partition without running; `*json_out` receives the plan JSON.
 *
 * # Safety
 * All pointers must be valid; free the string with `tqsim_string_free`.
 */
tqsim_status tqsim_plan_json(const tqsim_circuit *circuit,
                             const tqsim_noise_model *model,
                             const tqsim_run_options *options,
                             char **json_out);

/**
 * Full results document as JSON.
 *
 * # Safety
 * `result` must be live; free the string with `tqsim_string_free`.
 */
tqsim_status tqsim_result_document_json(const tqsim_result *result, char **json_out);

/**
 * Only the counts object, as JSON mapping bitstrings to counts.
 *
 * # Safety
 * `result` must be live; free the string with `tqsim_string_free`.
 */
tqsim_status tqsim_result_counts_json(const tqsim_result *result, char **json_out);

/**
 * Release a result handle. Null is ignored.
 *
 * # Safety
 * `result` must be null or a pointer previously returned by this library,
 * released at most once.
 */
void tqsim_result_free(tqsim_result *result);

/**
 * Release a string returned through a `char**` out parameter.
 *
 * # Safety
 * `text` must be null or a string returned by this library, released at
 * most once.
 */
void tqsim_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TQSIM_H */
