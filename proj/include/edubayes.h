/* edubayes: discrete Bayes-net scoring, Gibbs calibration, and adaptive
 * testing for conjunctive skill models.
 *
 * Every function that can fail returns a status code; EB_OK means success.
 * On failure the out-parameters are untouched and eb_last_error() returns a
 * thread-local diagnostic. Strings returned through char** are heap copies;
 * release them with eb_string_free. Handles are released with their matching
 * *_free, which tolerates NULL.
 */
#ifndef EDUBAYES_H
#define EDUBAYES_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef EB_API
#define EB_API __attribute__((visibility("default")))
#endif

typedef struct eb_model eb_model;
typedef struct eb_truth eb_truth;
typedef struct eb_responses eb_responses;
typedef struct eb_run eb_run;
typedef struct eb_score_report eb_score_report;
typedef struct eb_pool eb_pool;
typedef struct eb_cat_result eb_cat_result;

enum {
  EB_OK = 0,
  EB_ERR_INVALID_ARGUMENT = 1,
  EB_ERR_IO = 2,
  EB_ERR_PARSE = 3,
  EB_ERR_NUMERIC = 4,
  EB_ERR_INTERNAL = 5
};

EB_API const char* eb_version(void);
EB_API const char* eb_last_error(void);
EB_API void eb_string_free(char* s);

/* ------------------------------------------------------------------ model */

/* The built-in mixed-number-subtraction assessment: five skills, six
 * evidence models, fifteen tasks, default priors. */
EB_API int eb_model_builtin(eb_model** out);
EB_API int eb_model_load(const char* path, eb_model** out);
EB_API int eb_model_save(const eb_model* model, const char* path);
EB_API int eb_model_to_json(const eb_model* model, char** out);
EB_API void eb_model_free(eb_model* model);
EB_API int eb_model_counts(const eb_model* model, int32_t* variables, int32_t* scalars,
                           int32_t* evidence_models, int32_t* tasks);

/* ------------------------------------------------------- generating truth */

/* Draw generating parameters from the model's priors. */
EB_API int eb_truth_sample(const eb_model* model, uint64_t seed, eb_truth** out);
EB_API int eb_truth_load(const char* path, const eb_model* model, eb_truth** out);
EB_API int eb_truth_save(const eb_model* model, const eb_truth* truth, const char* path);
EB_API void eb_truth_free(eb_truth* truth);

/* Simulate examinees under the truth's parameters. out_truth (optional)
 * receives a copy of the truth carrying the sampled skill states. */
EB_API int eb_generate(const eb_model* model, const eb_truth* truth, int32_t examinees,
                       uint64_t seed, eb_responses** out_responses, eb_truth** out_truth);

/* -------------------------------------------------------------- responses */

EB_API int eb_responses_load(const char* path, eb_responses** out);
EB_API int eb_responses_save(const eb_responses* data, const char* path);
EB_API void eb_responses_free(eb_responses* data);
EB_API int eb_responses_shape(const eb_responses* data, int32_t* examinees, int32_t* tasks);
EB_API int eb_responses_task_name(const eb_responses* data, int32_t index, char** out);
EB_API int eb_responses_examinee_name(const eb_responses* data, int32_t index, char** out);
/* First / last n examinees. */
EB_API int eb_responses_head(const eb_responses* data, int32_t examinees, eb_responses** out);
EB_API int eb_responses_tail(const eb_responses* data, int32_t examinees, eb_responses** out);
/* task_ids: comma-separated column names. */
EB_API int eb_responses_select_tasks(const eb_responses* data, const char* task_ids,
                                     eb_responses** out);
EB_API int eb_responses_drop_tasks(const eb_responses* data, const char* task_ids,
                                   eb_responses** out);

/* ------------------------------------------------------------ calibration */

/* config_json keys (all optional): chains, burn_in, retained, thin, seed.
 * NULL takes every default (3 chains, 2000 burn-in, 5000 retained). */
EB_API int eb_calibrate(const eb_model* model, const eb_responses* data, const char* config_json,
                        eb_run** out);

/* mode: "full" re-estimates everything under moment-matched priors from the
 * startup run; "eb" pins old parameters at their posterior means and samples
 * only the uncalibrated tasks. */
EB_API int eb_calibrate_new(const eb_model* model, const eb_run* startup,
                            const eb_responses* new_data, const char* mode,
                            const char* config_json, eb_run** out);

EB_API int eb_run_load(const char* path, eb_run** out);
EB_API int eb_run_save(const eb_run* run, const char* path);
EB_API void eb_run_free(eb_run* run);
EB_API int eb_run_mode(const eb_run* run, char** out);
EB_API int eb_run_report_text(const eb_run* run, char** out);
EB_API int eb_run_to_json(const eb_run* run, char** out);
/* Retained draws; errors on a run restored from disk (draws are not stored). */
EB_API int eb_run_draws_csv(const eb_run* run, char** out);
EB_API int eb_run_num_scalars(const eb_run* run, int32_t* out);
EB_API int eb_run_scalar_name(const eb_run* run, int32_t index, char** out);
/* out_stats: mean, sd, alpha, beta, n, rhat. */
EB_API int eb_run_scalar(const eb_run* run, const char* name, double out_stats[6]);
EB_API int eb_comparison_report_text(const eb_run* full, const eb_run* eb, char** out);

/* ---------------------------------------------------------------- scoring */

/* observations: "task=value" pairs, comma separated ("item01=1,item03=0").
 * With a run, parameters sit at its posterior means; tasks outside the run
 * fall back to values stored in the model. With run NULL the model itself
 * must carry calibrated values for every observed task. */
EB_API int eb_score(const eb_model* model, const eb_run* run, const char* observations,
                    eb_score_report** out);
/* Score under the generating parameters. */
EB_API int eb_score_with_truth(const eb_model* model, const eb_truth* truth,
                               const char* observations, eb_score_report** out);
/* One examinee's non-missing row from a response matrix. */
EB_API int eb_score_matrix(const eb_model* model, const eb_run* run, const eb_responses* data,
                           const char* examinee, eb_score_report** out);
EB_API void eb_score_report_free(eb_score_report* report);
EB_API int eb_score_report_text(const eb_score_report* report, char** out);
EB_API int eb_score_report_json(const eb_score_report* report, char** out);
EB_API int eb_score_report_size(const eb_score_report* report, int32_t* out);
EB_API int eb_score_report_skill(const eb_score_report* report, int32_t index, char** skill,
                                 double* prior, double* posterior);

/* -------------------------------------------------------------- item pools */

EB_API int eb_pool_load(const char* path, eb_pool** out);
EB_API int eb_pool_save(const eb_pool* pool, const char* path);
EB_API void eb_pool_free(eb_pool* pool);
EB_API int eb_pool_size(const eb_pool* pool, int32_t* out);
/* items "i001", "i002", ... with difficulties uniform on [beta_min, beta_max]. */
EB_API int eb_pool_synthetic(int32_t items, double beta_min, double beta_max, uint64_t seed,
                             eb_pool** out);

/* --------------------------------------------------------- adaptive testing */

/* config_json keys (all optional): sessions, theta_mean, theta_sd,
 * theta_fixed (number; pins every session), stop_sd, max_items,
 * selector ("adaptive" | "random" | "both"), seed, grid_points, grid_min,
 * grid_max. "both" runs the two selectors against identical responders. */
EB_API int eb_cat_simulate(const eb_pool* pool, const char* config_json, eb_cat_result** out);
EB_API void eb_cat_result_free(eb_cat_result* result);
EB_API int eb_cat_traces_csv(const eb_cat_result* result, char** out);
EB_API int eb_cat_summary_json(const eb_cat_result* result, char** out);
EB_API int eb_cat_summary_text(const eb_cat_result* result, char** out);
/* Stats for one selector present in the result. */
EB_API int eb_cat_stats(const eb_cat_result* result, const char* selector, double* mean_items,
                        double* mean_abs_error, double* coverage_3sd);

/* -------------------------------------------- online difficulty calibration */

/* Calibrate the data columns not covered by old_items (NULL = calibrate all
 * columns from scratch). priors_json: [{"id","mean","variance"}, ...] per new
 * item, optional. config_json keys: burn_in, retained, thin, proposal_sd,
 * seed, grid_points, grid_min, grid_max. Returns a JSON summary with
 * posterior mean/sd and the Metropolis acceptance rate per new item. */
EB_API int eb_rasch_online(const eb_responses* data, const eb_pool* old_items,
                           const char* priors_json, const char* config_json, char** out_json);

/* ---------------------------------------------------------------- utility */

/* FNV-1a of the file bytes, 16 hex digits. */
EB_API int eb_file_checksum(const char* path, char** out);

#ifdef __cplusplus
}
#endif

#endif /* EDUBAYES_H */
