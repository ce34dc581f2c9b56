#ifndef CPSCOPE_H
#define CPSCOPE_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CpsFilterLevel {
  CPS_FILTER_LEVEL_BASIC = 0,
  CPS_FILTER_LEVEL_BOUNDS = 1,
  CPS_FILTER_LEVEL_EXTENDED = 2,
} CpsFilterLevel;

typedef enum CpsOrder {
  CPS_ORDER_INCREASING = 0,
  CPS_ORDER_DECREASING = 1,
  CPS_ORDER_SEQUENTIAL = 2,
} CpsOrder;

typedef enum CpsStatus {
  CPS_STATUS_OK = 0,
  CPS_STATUS_NULL_ARGUMENT = 1,
  CPS_STATUS_INVALID_UTF8 = 2,
  CPS_STATUS_UNKNOWN_MODEL = 3,
  CPS_STATUS_INVALID_MODEL = 4,
  /**
   * The requested value does not exist, e.g. no solution was found.
   */
  CPS_STATUS_NO_VALUE = 5,
  CPS_STATUS_IO = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  CPS_STATUS_INTERNAL = 7,
} CpsStatus;

/**
 * A model and the options it will be solved with.
 */
typedef struct CpsModel CpsModel;

/**
 * The result of one search, with its trace.
 */
typedef struct CpsRun CpsRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static string.
 */
const char *cps_version(void);

/**
 * Message of the last failed call on this thread, or NULL. Valid until
 * the next failing call on the same thread.
 */
const char *cps_last_error(void);

/**
 * Loads a built-in model by name (see `cpscope list-models`) or a JSON
 * model file by path.
 */
enum CpsStatus cps_model_load(const char *reference, struct CpsModel **out);

/**
 * Parses a model from JSON text.
 */
enum CpsStatus cps_model_from_json(const char *json, struct CpsModel **out);

void cps_model_free(struct CpsModel *model);

enum CpsStatus cps_model_set_filter_level(struct CpsModel *model, enum CpsFilterLevel level);

/**
 * Task order of the ranking procedure; ignored by models without one.
 */
enum CpsStatus cps_model_set_order(struct CpsModel *model, enum CpsOrder order);

/**
 * Limited discrepancy search up to `max_discrepancies`; a negative value
 * selects depth-first search.
 */
enum CpsStatus cps_model_set_lds(struct CpsModel *model, int32_t max_discrepancies);

/**
 * Records every propagation event in the trace.
 */
enum CpsStatus cps_model_set_spy(struct CpsModel *model, bool on);

/**
 * Stops after `limit` nodes; 0 means no limit.
 */
enum CpsStatus cps_model_set_node_limit(struct CpsModel *model, uint64_t limit);

/**
 * Solves the model from scratch. The model stays usable.
 */
enum CpsStatus cps_model_solve(struct CpsModel *model, struct CpsRun **out);

void cps_run_free(struct CpsRun *run);

/**
 * Tree nodes, white and black ones included.
 */
uint64_t cps_run_node_count(const struct CpsRun *run);

uint64_t cps_run_solution_count(const struct CpsRun *run);

/**
 * Propagation events over the whole run.
 */
uint64_t cps_run_event_count(const struct CpsRun *run);

/**
 * Whether the search space was exhausted, which for an optimization
 * model proves the best objective optimal.
 */
bool cps_run_proven(const struct CpsRun *run);

/**
 * Number of right subtrees in the search tree.
 */
uint64_t cps_run_right_subtree_count(const struct CpsRun *run);

/**
 * Best objective value; `NoValue` for satisfaction models or when no
 * solution was found.
 */
enum CpsStatus cps_run_best_objective(const struct CpsRun *run, int64_t *value);

/**
 * Value of a decision variable in the last (best) solution.
 */
enum CpsStatus cps_run_solution_value(const struct CpsRun *run, const char *var, int64_t *value);

/**
 * Writes the run's trace file.
 */
enum CpsStatus cps_run_write_trace(const struct CpsRun *run, const char *path);

/**
 * The trace as newline-delimited JSON. Free with [`cps_string_free`].
 */
char *cps_run_trace_text(const struct CpsRun *run);

void cps_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CPSCOPE_H */
