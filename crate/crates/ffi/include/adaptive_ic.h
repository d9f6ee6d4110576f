#ifndef ADAPTIVE_IC_H
#define ADAPTIVE_IC_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of one run.
 */
typedef enum AicOutcome {
  AIC_OUTCOME_CORRECT = 0,
  AIC_OUTCOME_WRONG = 1,
  AIC_OUTCOME_ABORT = 2,
  AIC_OUTCOME_FAULT = 3,
} AicOutcome;

/**
 * Result of a call.
 */
typedef enum AicStatus {
  AIC_STATUS_OK = 0,
  AIC_STATUS_NULL_POINTER = 1,
  AIC_STATUS_INVALID_UTF8 = 2,
  AIC_STATUS_CONFIG = 3,
  AIC_STATUS_IO = 4,
  AIC_STATUS_OUT_OF_RANGE = 5,
  AIC_STATUS_INTERNAL = 6,
} AicStatus;

/**
 * A validated experiment.
 */
typedef struct AicExperiment AicExperiment;

/**
 * The rows of a finished experiment.
 */
typedef struct AicReport AicReport;

/**
 * Numeric columns of a report row.
 */
typedef struct AicRow {
  uint64_t trial;
  uint64_t seed;
  uint64_t cc;
  uint64_t nc;
  /**
   * `nc / cc`; infinite when only noise was sent.
   */
  double nr;
  uint64_t rounds;
  enum AicOutcome outcome;
  bool within_budget;
} AicRow;

typedef struct AicSummary {
  uint64_t rows;
  uint64_t correct;
  uint64_t wrong;
  uint64_t abort;
  uint64_t fault;
  uint64_t within_budget;
  uint64_t suite_failures;
} AicSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last error on this thread, or null. Valid until the next
 * call on the same thread.
 */
const char *aic_last_error(void);

/**
 * Library version as a static string.
 */
const char *aic_version(void);

/**
 * Validates a JSON experiment configuration (same fields as the CLI flags).
 *
 * # Safety
 * `config_json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum AicStatus aic_experiment_new(const char *config_json, struct AicExperiment **out);

/**
 * # Safety
 * `experiment` must come from [`aic_experiment_new`] and not be used after.
 */
void aic_experiment_free(struct AicExperiment *experiment);

/**
 * Number of rows the experiment will produce.
 *
 * # Safety
 * `experiment` must be a live handle or null.
 */
uint64_t aic_experiment_row_count(const struct AicExperiment *experiment);

/**
 * Runs every trial.
 *
 * # Safety
 * `experiment` must be a live handle and `out` a valid pointer.
 */
enum AicStatus aic_experiment_run(const struct AicExperiment *experiment, struct AicReport **out);

/**
 * # Safety
 * `report` must come from [`aic_experiment_run`] and not be used after.
 */
void aic_report_free(struct AicReport *report);

/**
 * # Safety
 * `report` must be a live handle or null.
 */
size_t aic_report_len(const struct AicReport *report);

/**
 * Copies row `index` into `out`.
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum AicStatus aic_report_row(const struct AicReport *report, size_t index, struct AicRow *out);

/**
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum AicStatus aic_report_summary(const struct AicReport *report, struct AicSummary *out);

/**
 * Writes the report as CSV.
 *
 * # Safety
 * `report` must be a live handle and `path` a NUL-terminated string.
 */
enum AicStatus aic_report_write_csv(const struct AicReport *report, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ADAPTIVE_IC_H */
