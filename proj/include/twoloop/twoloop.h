#ifndef TWOLOOP_TWOLOOP_H
#define TWOLOOP_TWOLOOP_H

/* C interface of the twoloop library. Every function returns a status code;
 * on failure twoloop_last_error() describes the most recent error raised on
 * the calling thread. Handles are opaque and owned by the caller once
 * returned. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define TWOLOOP_API __declspec(dllexport)
#else
#define TWOLOOP_API __attribute__((visibility("default")))
#endif

typedef enum twoloop_status {
  TWOLOOP_OK = 0,
  /* Invalid or unreadable config, or a rejected override. */
  TWOLOOP_ERR_CONFIG = 1,
  /* Missing or corrupt checkpoint or run directory. */
  TWOLOOP_ERR_CHECKPOINT = 2,
  /* No trajectory or no successful evaluation to report on. */
  TWOLOOP_ERR_EMPTY_TRAJECTORY = 3,
  /* Failure while the run was executing; the last checkpoint is intact. */
  TWOLOOP_ERR_RUN = 4,
  TWOLOOP_ERR_INVALID_ARGUMENT = 5,
  TWOLOOP_ERR_INTERNAL = 6
} twoloop_status;

typedef struct twoloop_options twoloop_options;
typedef struct twoloop_report twoloop_report;

TWOLOOP_API const char* twoloop_version(void);
TWOLOOP_API const char* twoloop_status_string(twoloop_status status);
/* Message of the last failure on this thread; empty after a success. */
TWOLOOP_API const char* twoloop_last_error(void);

/* Log output: 0 writes warnings and progress to stderr, 1 silences it. */
TWOLOOP_API void twoloop_set_quiet(int quiet);

/* Overrides for run and resume. */
TWOLOOP_API twoloop_status twoloop_options_new(twoloop_options** out);
TWOLOOP_API void twoloop_options_free(twoloop_options* options);
TWOLOOP_API twoloop_status twoloop_options_set_seed(twoloop_options* options, uint64_t seed);
TWOLOOP_API twoloop_status twoloop_options_set_max_parallel(twoloop_options* options, size_t n);
TWOLOOP_API twoloop_status twoloop_options_set_generations(twoloop_options* options, size_t n);
/* Stops once `n` generations exist in total, leaving a resumable run. */
TWOLOOP_API twoloop_status twoloop_options_set_stop_after(twoloop_options* options, size_t n);

/* `options` may be NULL. `report` may be NULL when the caller does not need it. */
TWOLOOP_API twoloop_status twoloop_run(const char* config_path, const twoloop_options* options,
                                       twoloop_report** report);
TWOLOOP_API twoloop_status twoloop_resume(const char* results_dir, const twoloop_options* options,
                                          twoloop_report** report);
TWOLOOP_API twoloop_status twoloop_export(const char* results_dir, const char* out_csv,
                                          size_t* rows);
/* The report carries the warnings; its summary is empty. */
TWOLOOP_API twoloop_status twoloop_validate(const char* config_path, twoloop_report** report);

TWOLOOP_API void twoloop_report_free(twoloop_report* report);
TWOLOOP_API size_t twoloop_report_generations(const twoloop_report* report);
TWOLOOP_API int twoloop_report_completed(const twoloop_report* report);
TWOLOOP_API int twoloop_report_already_complete(const twoloop_report* report);
/* summary.json contents, or "" when none. Valid until the report is freed. */
TWOLOOP_API const char* twoloop_report_summary(const twoloop_report* report);
TWOLOOP_API size_t twoloop_report_warning_count(const twoloop_report* report);
TWOLOOP_API const char* twoloop_report_warning(const twoloop_report* report, size_t i);

/* Fitness utilities. */
TWOLOOP_API twoloop_status twoloop_weight_fitness(const double* fitness, const double* weights,
                                                  size_t k, double* out);
TWOLOOP_API twoloop_status twoloop_softmax(const double* x, size_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif /* TWOLOOP_TWOLOOP_H */
