/*
 * plpfrail: Bayesian inference for multiple repairable systems whose
 * cause-specific failure processes are power-law NHPPs sharing a
 * system-level frailty.
 *
 * Every object is an opaque handle created and released by this library.
 * Functions report failures through plpf_status; the message of the most
 * recent failure on the calling thread is available from plpf_last_error().
 * Indices of systems and causes are 1-based, matching the data files.
 */
#ifndef PLPFRAIL_PLPFRAIL_H
#define PLPFRAIL_PLPFRAIL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PLPF_BUILDING_LIBRARY)
#    define PLPF_API __declspec(dllexport)
#  else
#    define PLPF_API __declspec(dllimport)
#  endif
#else
#  define PLPF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as the CLI's process exit codes. */
typedef enum plpf_status {
  PLPF_OK = 0,
  PLPF_ERR_CONFIG = 2,    /* invalid option or precondition */
  PLPF_ERR_DATA = 3,      /* malformed or out-of-domain input data */
  PLPF_ERR_NUMERICAL = 4, /* improper posterior, undefined estimator, divergence */
  PLPF_ERR_IO = 5,
  PLPF_ERR_INTERNAL = 6
} plpf_status;

PLPF_API const char* plpf_version(void);
PLPF_API const char* plpf_last_error(void);

/* ------------------------------------------------------------------ */
/* Failure data                                                        */
/* ------------------------------------------------------------------ */

typedef struct plpf_dataset plpf_dataset;

/* Values <= 0 leave the field to the file header (or inference from the
 * records for m and K). */
typedef struct plpf_design_overrides {
  double T;
  int64_t m;
  int64_t K;
} plpf_design_overrides;

/* Reads CSV with header `system_id,cause,time` and optional `# T=`, `# m=`,
 * `# K=` lines. `overrides` may be NULL. */
PLPF_API plpf_status plpf_dataset_read(const char* path, const plpf_design_overrides* overrides,
                                       plpf_dataset** out);
PLPF_API plpf_status plpf_dataset_create(double T, size_t m, size_t K, const size_t* system_ids,
                                         const size_t* causes, const double* times, size_t n,
                                         plpf_dataset** out);
PLPF_API plpf_status plpf_dataset_write(const plpf_dataset* data, const char* path);
PLPF_API void plpf_dataset_free(plpf_dataset* data);

PLPF_API double plpf_dataset_horizon(const plpf_dataset* data);
PLPF_API size_t plpf_dataset_systems(const plpf_dataset* data);
PLPF_API size_t plpf_dataset_causes(const plpf_dataset* data);
PLPF_API size_t plpf_dataset_records(const plpf_dataset* data);

/* Any output pointer may be NULL. n_jq is m x K row-major. */
PLPF_API plpf_status plpf_dataset_counts(const plpf_dataset* data, long* n_jq, long* n_j, long* n_q,
                                         double* log_ratio_sums);

/* ------------------------------------------------------------------ */
/* Closed-form PLP inference                                           */
/* ------------------------------------------------------------------ */

typedef struct plpf_estimate {
  char parameter[32]; /* "beta_1", ..., "alpha_1", ... */
  double mean;
  double sd;
  double ci_low;
  double ci_high;
} plpf_estimate;

/* Posterior means, SDs and equal-tail intervals under the prior
 * prod alpha_q^-1 beta_q^-zeta. Writes 2K rows (betas, then alphas). */
PLPF_API plpf_status plpf_fit(const plpf_dataset* data, double zeta, double level,
                              plpf_estimate* out, size_t capacity, size_t* count);

/* beta: K entries. classic_mu (may be NULL) receives the classic scale MLE
 * when m = K = 1 and NaN otherwise. */
PLPF_API plpf_status plpf_mle(const plpf_dataset* data, double* beta, double* classic_mu);

/* Duane points for one cause: log failure time vs log mean cumulative count.
 * `count` receives the number of points (n_q); arrays may be NULL to query it. */
PLPF_API plpf_status plpf_duane(const plpf_dataset* data, size_t cause, double* log_time,
                                double* log_count, size_t capacity, size_t* count, double* slope,
                                double* intercept);

PLPF_API plpf_status plpf_intensity(const double* beta, const double* alpha, size_t K, size_t cause,
                                    double t, double T, double z, double* out);
PLPF_API plpf_status plpf_log_likelihood(const plpf_dataset* data, const double* beta,
                                         const double* alpha, const double* z, double* out);

/* ------------------------------------------------------------------ */
/* Simulation                                                          */
/* ------------------------------------------------------------------ */

typedef enum plpf_frailty_family {
  PLPF_FRAILTY_GAMMA = 0,
  PLPF_FRAILTY_POINT_MASS = 1,
  PLPF_FRAILTY_LOGNORMAL_MIXTURE = 2
} plpf_frailty_family;

typedef struct plpf_scenario {
  double T;
  size_t m;
  size_t K;
  const double* beta;  /* K entries */
  const double* alpha; /* K entries */
  double eta;          /* gamma frailty variance */
  int family;          /* plpf_frailty_family */
  size_t mixture_components;
  const double* mixture_weights;
  const double* mixture_log_means;
  const double* mixture_log_sds;
  uint64_t seed;
} plpf_scenario;

/* Fills `out` for a named scenario ("table1", "table2"); beta_buf and
 * alpha_buf must hold `capacity` >= 2 entries and outlive `out`. */
PLPF_API plpf_status plpf_scenario_preset(const char* key, size_t m, double eta, uint64_t seed,
                                          double* beta_buf, double* alpha_buf, size_t capacity,
                                          plpf_scenario* out);

/* Population variance of the frailty under the scenario's family. */
PLPF_API plpf_status plpf_scenario_frailty_variance(const plpf_scenario* scenario, double* out);

PLPF_API plpf_status plpf_draw_frailties(const plpf_scenario* scenario, double* z_out);

/* z_out (may be NULL) receives the m frailties used. */
PLPF_API plpf_status plpf_simulate(const plpf_scenario* scenario, plpf_dataset** out,
                                   double* z_out);

/* ------------------------------------------------------------------ */
/* DPM frailty sampler                                                 */
/* ------------------------------------------------------------------ */

typedef struct plpf_mcmc_config {
  double ac0, bc0;            /* Gamma hyperprior on the concentration */
  double m0, s0, d0, p0;      /* normal-gamma base measure */
  double step_size;           /* initial HMC step */
  int leapfrog_steps;
  double jitter;
  int adapt;                  /* dual averaging during burn-in */
  double target_accept;
  size_t iterations;
  size_t burn_in;
  uint64_t seed;
  int keep_mixture;           /* store post-burn-in mixtures for density estimates */
} plpf_mcmc_config;

PLPF_API void plpf_mcmc_config_default(plpf_mcmc_config* config);

typedef struct plpf_trace plpf_trace;

typedef enum plpf_series {
  PLPF_SERIES_VAR_Z = 0,
  PLPF_SERIES_MIXTURE_VAR = 1,
  PLPF_SERIES_CONCENTRATION = 2,
  PLPF_SERIES_CLUSTERS = 3,
  PLPF_SERIES_ACCEPTED = 4,
  PLPF_SERIES_ACCEPT_PROB = 5,
  PLPF_SERIES_STEP_SIZE = 6,
  PLPF_SERIES_DIVERGENT = 7
} plpf_series;

typedef struct plpf_summary {
  double mean;
  double sd;
  double ci_low;
  double ci_high;
} plpf_summary;

PLPF_API plpf_status plpf_mcmc_run(const plpf_dataset* data, const plpf_mcmc_config* config,
                                   plpf_trace** out);
PLPF_API void plpf_trace_free(plpf_trace* trace);

PLPF_API size_t plpf_trace_iterations(const plpf_trace* trace);
PLPF_API size_t plpf_trace_burn_in(const plpf_trace* trace);
PLPF_API size_t plpf_trace_systems(const plpf_trace* trace);
PLPF_API size_t plpf_trace_divergences(const plpf_trace* trace);
PLPF_API double plpf_trace_acceptance_rate(const plpf_trace* trace);

/* Z at one iteration (m entries). */
PLPF_API plpf_status plpf_trace_z(const plpf_trace* trace, size_t iteration, double* out);
/* One value per iteration. */
PLPF_API plpf_status plpf_trace_series(const plpf_trace* trace, plpf_series which, double* out);
/* Post-burn-in mean of Z (m entries). */
PLPF_API plpf_status plpf_trace_z_hat(const plpf_trace* trace, double* out);
PLPF_API plpf_status plpf_trace_var_summary(const plpf_trace* trace, double level,
                                            plpf_summary* out);
/* Posterior frailty density averaged over post-burn-in mixtures. */
PLPF_API plpf_status plpf_trace_density(const plpf_trace* trace, const double* grid, size_t n,
                                        double* out);

/* ------------------------------------------------------------------ */
/* Diagnostics                                                         */
/* ------------------------------------------------------------------ */

typedef struct plpf_geweke_result {
  double z_score;
  double first_frac;
  double last_frac;
  int pass; /* |z| < 1.96 */
} plpf_geweke_result;

PLPF_API plpf_status plpf_geweke(const double* x, size_t n, double first_frac, double last_frac,
                                 plpf_geweke_result* out);
/* out holds max_lag + 1 values. */
PLPF_API plpf_status plpf_autocorrelation(const double* x, size_t n, size_t max_lag, double* out);
PLPF_API plpf_status plpf_ess(const double* x, size_t n, double* out);
PLPF_API plpf_status plpf_summarize_draws(const double* x, size_t n, double level,
                                          plpf_summary* out);

/* ------------------------------------------------------------------ */
/* Monte Carlo harness                                                 */
/* ------------------------------------------------------------------ */

typedef struct plpf_harness_options {
  size_t replications;
  double zeta;
  double level;
  int with_mcmc;
  plpf_mcmc_config mcmc; /* iterations / burn_in used per replication */
  unsigned threads;      /* 0: hardware concurrency */
} plpf_harness_options;

PLPF_API void plpf_harness_options_default(plpf_harness_options* options);

typedef struct plpf_report plpf_report;

typedef struct plpf_param_stats {
  char parameter[32]; /* alpha_q, beta_q, eta */
  double truth;
  double bias;
  double mse;
  double coverage;
  double bias_se;
  double mse_se;
} plpf_param_stats;

PLPF_API plpf_status plpf_harness_run(const plpf_scenario* scenario,
                                      const plpf_harness_options* options, const char* label,
                                      plpf_report** out);
PLPF_API void plpf_report_free(plpf_report* report);
PLPF_API size_t plpf_report_rows(const plpf_report* report);
PLPF_API size_t plpf_report_used(const plpf_report* report);
PLPF_API plpf_status plpf_report_row(const plpf_report* report, size_t index,
                                     plpf_param_stats* out);
/* Writes the reports in table layout (eta, statistic, m, alpha_*, beta_*, eta_hat). */
PLPF_API plpf_status plpf_reports_write_csv(const plpf_report* const* reports, size_t n,
                                            const char* path);

#ifdef __cplusplus
}
#endif

#endif /* PLPFRAIL_PLPFRAIL_H */
