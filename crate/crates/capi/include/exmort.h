#ifndef EXMORT_H
#define EXMORT_H

/* Generated by cbindgen from exmort-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call. `Validation` and `Io` mirror the CLI
 * exit codes 2 and 3.
 */
typedef enum {
  EXM_STATUS_OK = 0,
  EXM_STATUS_NULL_POINTER = 1,
  EXM_STATUS_VALIDATION = 2,
  EXM_STATUS_IO = 3,
  EXM_STATUS_UTF8 = 4,
  EXM_STATUS_PANIC = 5,
} ExmStatus;

/**
 * Expected yearly deaths per year and age group (opaque).
 */
typedef struct ExmExpected ExmExpected;

/**
 * A period life table together with its derived cohort table (opaque).
 */
typedef struct ExmLifeTable ExmLifeTable;

/**
 * Population stocks per year and age (opaque).
 */
typedef struct ExmPopulation ExmPopulation;

/**
 * Weekly observed, expected and SMR per age group (opaque).
 */
typedef struct ExmSmr ExmSmr;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *exm_version(void);

/**
 * Message for the most recent failure on this thread, or null if no
 * call has failed yet. Valid until the next failing call.
 */
const char *exm_last_error(void);

/**
 * Loads December 31 population stocks from a `year,age,count` CSV.
 */
ExmStatus exm_population_load(const char *path, ExmPopulation **out);

/**
 * Stock at December 31 of `year` for a single age.
 */
ExmStatus exm_population_stock(const ExmPopulation *population,
                               int32_t year,
                               uint32_t age,
                               double *out);

/**
 * Highest age covered by the population series.
 */
ExmStatus exm_population_max_age(const ExmPopulation *population, uint32_t *out);

void exm_population_free(ExmPopulation *population);

/**
 * Loads an official life table from an `age,qx` CSV and derives the
 * cohort-corrected probabilities.
 */
ExmStatus exm_lifetable_load(const char *path, ExmLifeTable **out);

/**
 * Estimates a life table from yearly deaths (`year,age,count` CSV) and
 * population stocks over the window `[start_year, end_year]`, then
 * derives the cohort-corrected probabilities.
 */
ExmStatus exm_lifetable_build(const char *deaths_path,
                              const ExmPopulation *population,
                              int32_t start_year,
                              int32_t end_year,
                              ExmLifeTable **out);

/**
 * Highest age in the life table.
 */
ExmStatus exm_lifetable_max_age(const ExmLifeTable *table, uint32_t *out);

/**
 * Period death probability for one age.
 */
ExmStatus exm_lifetable_qx(const ExmLifeTable *table, uint32_t age, double *out);

/**
 * Cohort-corrected death probability for one age.
 */
ExmStatus exm_lifetable_qtilde(const ExmLifeTable *table, uint32_t age, double *out);

void exm_lifetable_free(ExmLifeTable *table);

/**
 * Computes expected yearly deaths with method 1, 2 or 3.
 *
 * Age groups are given as parallel `group_lowers` / `group_uppers`
 * arrays; a negative upper bound marks an open-ended group. They must
 * partition `[0, max_age]` of the life table.
 */
ExmStatus exm_expected_yearly(const ExmLifeTable *table,
                              const ExmPopulation *population,
                              uint32_t method,
                              const uint32_t *group_lowers,
                              const int32_t *group_uppers,
                              size_t n_groups,
                              const int32_t *years,
                              size_t n_years,
                              ExmExpected **out);

/**
 * Expected deaths for one year and age group (negative upper = open).
 */
ExmStatus exm_expected_value(const ExmExpected *expected,
                             int32_t year,
                             uint32_t group_lower,
                             int32_t group_upper,
                             double *out);

/**
 * Expected deaths summed over all age groups for one year.
 */
ExmStatus exm_expected_total(const ExmExpected *expected, int32_t year, double *out);

void exm_expected_free(ExmExpected *expected);

/**
 * Runs the weekly indirect-standardization pipeline: interpolated
 * weekly population, weekly rates averaged over the reference years
 * (imputing week 53 where needed) and the resulting SMR series for the
 * target year.
 *
 * Weekly deaths are read from an
 * `iso_year,iso_week,age_lower,age_upper,count` CSV. Passing
 * `n_weeks = 0` selects every ISO week of the target year.
 */
ExmStatus exm_smr_weekly(const ExmPopulation *population,
                         const char *deaths_path,
                         const int32_t *reference_years,
                         size_t n_reference_years,
                         int32_t target_year,
                         const uint32_t *weeks,
                         size_t n_weeks,
                         ExmSmr **out);

/**
 * Observed deaths, expected deaths and SMR for one week and age group
 * (negative upper = open). When the expected count is zero the SMR is
 * undefined and `out_smr` receives NaN.
 */
ExmStatus exm_smr_row(const ExmSmr *smr,
                      int32_t iso_year,
                      uint32_t iso_week,
                      uint32_t group_lower,
                      int32_t group_upper,
                      double *out_observed,
                      double *out_expected,
                      double *out_smr);

void exm_smr_free(ExmSmr *smr);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EXMORT_H */
