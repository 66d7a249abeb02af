#ifndef SEESAW_FFI_H
#define SEESAW_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SeesawStatus {
  SEESAW_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  SEESAW_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  SEESAW_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed or invalid scenario configuration.
   */
  SEESAW_STATUS_CONFIG = 3,
  /**
   * The integrator or a numerical check failed.
   */
  SEESAW_STATUS_NUMERICAL = 4,
  /**
   * File system error.
   */
  SEESAW_STATUS_IO = 5,
  /**
   * Row or column index out of range, or a too-small buffer.
   */
  SEESAW_STATUS_OUT_OF_RANGE = 6,
  /**
   * Internal panic; the library state is unaffected.
   */
  SEESAW_STATUS_PANIC = 7,
} SeesawStatus;

/**
 * Parsed, validated scenario.
 */
typedef struct SeesawScenario SeesawScenario;

/**
 * Time series produced by a run.
 */
typedef struct SeesawTable SeesawTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or null if none.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *seesaw_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *seesaw_version(void);

/**
 * Parses scenario text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum SeesawStatus seesaw_scenario_from_config(const char *text, struct SeesawScenario **out);

/**
 * Loads a scenario file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum SeesawStatus seesaw_scenario_load(const char *path, struct SeesawScenario **out);

/**
 * Loads a built-in scenario by name (`fig2` … `fig6`, `damped-cavity`, …).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum SeesawStatus seesaw_scenario_builtin(const char *name, struct SeesawScenario **out);

/**
 * # Safety
 * `scenario` must be null or a live scenario handle.
 */
enum SeesawStatus seesaw_scenario_set_seed(struct SeesawScenario *scenario, uint64_t seed);

/**
 * # Safety
 * `scenario` must be null or a live scenario handle.
 */
enum SeesawStatus seesaw_scenario_set_trajectories(struct SeesawScenario *scenario,
                                                   uintptr_t n_traj);

/**
 * # Safety
 * `scenario` must be null or a handle not yet freed.
 */
void seesaw_scenario_free(struct SeesawScenario *scenario);

/**
 * Runs a scenario in memory.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum SeesawStatus seesaw_run(const struct SeesawScenario *scenario, struct SeesawTable **out);

/**
 * Runs a scenario and writes `timeseries.csv` and `meta.txt` into `dir`.
 *
 * # Safety
 * `scenario` must be a live handle; `dir` a NUL-terminated string.
 */
enum SeesawStatus seesaw_run_to_dir(const struct SeesawScenario *scenario, const char *dir);

/**
 * Number of recorded times.
 *
 * # Safety
 * `t` must be a live table handle; `out` must be writable.
 */
enum SeesawStatus seesaw_table_rows(const struct SeesawTable *t, uintptr_t *out);

/**
 * Number of observable columns, not counting time.
 *
 * # Safety
 * `t` must be a live table handle; `out` must be writable.
 */
enum SeesawStatus seesaw_table_columns(const struct SeesawTable *t, uintptr_t *out);

/**
 * Name of column `j`, owned by the table; null when out of range.
 *
 * # Safety
 * `t` must be null or a live table handle.
 */
const char *seesaw_table_column_name(const struct SeesawTable *t, uintptr_t j);

/**
 * Copies the recorded times into `buf`, which must hold `rows` values.
 *
 * # Safety
 * `t` must be a live table handle; `buf` must have room for `len` doubles.
 */
enum SeesawStatus seesaw_table_times(const struct SeesawTable *t, double *buf, uintptr_t len);

/**
 * Copies column `j` into `buf`, which must hold `rows` values.
 *
 * # Safety
 * `t` must be a live table handle; `buf` must have room for `len` doubles.
 */
enum SeesawStatus seesaw_table_column(const struct SeesawTable *t,
                                      uintptr_t j,
                                      double *buf,
                                      uintptr_t len);

/**
 * # Safety
 * `t` must be null or a handle not yet freed.
 */
void seesaw_table_free(struct SeesawTable *t);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEESAW_FFI_H */
