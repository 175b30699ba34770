/* C interface to the manisync library. All functions are thread-safe except
 * for concurrent use of one handle. Strings returned by the library are owned
 * by the handle (or are static) and stay valid until the handle is freed or
 * the next call on the same handle that returns a string. */
#ifndef MANISYNC_MANISYNC_H
#define MANISYNC_MANISYNC_H

#include <stddef.h>
#include <stdint.h>

#if defined(MANISYNC_BUILDING_LIBRARY)
#define MSYNC_API __attribute__((visibility("default")))
#else
#define MSYNC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum msync_status {
  MSYNC_OK = 0,
  MSYNC_ERR_INVALID_ARGUMENT = 1,
  MSYNC_ERR_VALIDATION = 2,
  MSYNC_ERR_NOT_FOUND = 3,
  MSYNC_ERR_IO = 4,
  MSYNC_ERR_NUMERIC = 5,
  MSYNC_ERR_INTERNAL = 6
} msync_status;

/* Process exit codes used by the command-line tool. */
enum { MSYNC_EXIT_OK = 0, MSYNC_EXIT_VALIDATION = 1, MSYNC_EXIT_ABORT = 2 };

/* Number of metric columns: t, P_L, P, sync_error, W, centroid_norm,
 * manifold_drift. */
enum { MSYNC_METRIC_COLUMNS = 7 };

typedef struct msync_scenario msync_scenario;
typedef struct msync_run msync_run;

MSYNC_API const char* msync_version(void);

/* Message of the last failed call on this thread, or "". */
MSYNC_API const char* msync_last_error(void);

MSYNC_API msync_status msync_scenario_parse(const char* text, msync_scenario** out);
MSYNC_API msync_status msync_scenario_load(const char* path, msync_scenario** out);
MSYNC_API msync_status msync_scenario_from_preset(const char* name, msync_scenario** out);
MSYNC_API void msync_scenario_free(msync_scenario* sc);

MSYNC_API const char* msync_scenario_name(const msync_scenario* sc);
MSYNC_API const char* msync_scenario_description(const msync_scenario* sc);
/* Canonical YAML text of the scenario. */
MSYNC_API const char* msync_scenario_text(msync_scenario* sc);

/* Overrides. Each one re-validates the scenario and leaves it unchanged on
 * failure. */
MSYNC_API msync_status msync_scenario_set_seed(msync_scenario* sc, uint64_t seed);
MSYNC_API msync_status msync_scenario_set_step(msync_scenario* sc, double h);
MSYNC_API msync_status msync_scenario_set_log_stride(msync_scenario* sc, int stride);
MSYNC_API msync_status msync_scenario_set_output_dir(msync_scenario* sc, const char* dir);

/* Integrates the scenario. With write_files != 0, writes metrics.csv,
 * final_state.json and summary.json to the output directory. An integrator
 * abort still returns MSYNC_OK; check msync_run_exit_code. */
MSYNC_API msync_status msync_run_scenario(const msync_scenario* sc, int write_files,
                                          msync_run** out);
MSYNC_API void msync_run_free(msync_run* run);

MSYNC_API int msync_run_exit_code(const msync_run* run);
MSYNC_API const char* msync_run_summary(const msync_run* run);
MSYNC_API const char* msync_run_output_dir(const msync_run* run);
MSYNC_API size_t msync_run_record_count(const msync_run* run);
/* Copies MSYNC_METRIC_COLUMNS values of record `index` into `out`. */
MSYNC_API msync_status msync_run_record(const msync_run* run, size_t index, double* out);

MSYNC_API size_t msync_preset_count(void);
/* NULL when index is out of range. */
MSYNC_API const char* msync_preset_name(size_t index);
MSYNC_API const char* msync_preset_text(size_t index);

/* Induced arithmetic mean of a centroid given in row-major order, `len`
 * values. Writes the representative point (same layout) into `rep`. */
MSYNC_API msync_status msync_iam(const char* manifold, const double* centroid, size_t len,
                                 double* rep, int* unique, double* optimal_value);

#ifdef __cplusplus
}
#endif

#endif
