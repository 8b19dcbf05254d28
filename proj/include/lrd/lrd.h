/* C interface to the lrd library.
 *
 * Every object is an opaque handle released with its *_free function.
 * Functions return an lrd_status; on failure lrd_last_error() holds a
 * message for the calling thread. Strings returned through char** are
 * owned by the caller and released with lrd_string_free.
 */
#ifndef LRD_LRD_H
#define LRD_LRD_H

#include <stddef.h>
#include <stdint.h>

#if defined(LRD_BUILDING_LIBRARY)
#define LRD_API __attribute__((visibility("default")))
#else
#define LRD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lrd_status {
  LRD_OK = 0,
  LRD_ERR_PARAMETER = 1,
  LRD_ERR_CONSTRAINT = 2,
  LRD_ERR_DEGENERATE = 3,
  LRD_ERR_NUMERICAL = 4,
  LRD_ERR_PARSE = 5,
  LRD_ERR_QUALITY = 6,
  LRD_ERR_IO = 7,
  LRD_ERR_INTERNAL = 8
} lrd_status;

typedef struct lrd_series lrd_series;
typedef struct lrd_config lrd_config;
typedef struct lrd_segmentation lrd_segmentation;
typedef struct lrd_dfa_result lrd_dfa_result;
typedef struct lrd_wavelet_result lrd_wavelet_result;
typedef struct lrd_report lrd_report;
typedef struct lrd_table1 lrd_table1;

LRD_API const char* lrd_version(void);
LRD_API const char* lrd_last_error(void);
LRD_API const char* lrd_status_name(lrd_status status);
/* 0 success, 1 usage or parameter, 2 input data, 3 numerical or degenerate. */
LRD_API int lrd_exit_code(lrd_status status);
LRD_API void lrd_string_free(char* s);

/* Series ---------------------------------------------------------------- */
LRD_API lrd_status lrd_series_create(const double* values, size_t n, double delta, double t0,
                                     lrd_series** out);
LRD_API void lrd_series_free(lrd_series* s);
LRD_API size_t lrd_series_length(const lrd_series* s);
LRD_API double lrd_series_delta(const lrd_series* s);
LRD_API double lrd_series_t0(const lrd_series* s);
/* Borrowed pointer, valid while the handle lives. */
LRD_API const double* lrd_series_values(const lrd_series* s);
LRD_API lrd_status lrd_series_to_csv(const lrd_series* s, char** out);
LRD_API lrd_status lrd_series_write_csv(const lrd_series* s, const char* path);
/* format: "uniform-csv" or "rr-ms"; RR files are cleaned and resampled with
 * the config (NULL for defaults). dropped may be NULL. */
LRD_API lrd_status lrd_series_read(const char* path, const char* format, const lrd_config* cfg,
                                   lrd_series** out, size_t* dropped);
LRD_API lrd_status lrd_series_aggregate(const lrd_series* s, lrd_series** out);

/* Synthesis ------------------------------------------------------------- */
LRD_API lrd_status lrd_fgn_autocovariance(double hurst, double sigma2, size_t lag, double* out);
LRD_API lrd_status lrd_generate_fgn(double hurst, double sigma2, size_t n, uint64_t seed,
                                    lrd_series** out);
/* NaN for h_low or h_high selects the default continuation exponent. */
LRD_API lrd_status lrd_generate_lfgn(double hurst, double sigma, double omega0, double omega1,
                                     double h_low, double h_high, size_t n, double delta,
                                     uint64_t seed, lrd_series** out, char** warning);
/* coefficients c0 + c1 u + ... on normalized time u = i / n. */
LRD_API lrd_status lrd_add_polynomial_trend(const lrd_series* s, const double* coefficients,
                                            size_t count, lrd_series** out);
/* levels has breaks_count + 1 entries; breaks strictly increasing in (0, 1). */
LRD_API lrd_status lrd_add_step_trend(const lrd_series* s, const double* levels,
                                      const double* breaks, size_t breaks_count,
                                      lrd_series** out);

/* Configuration --------------------------------------------------------- */
LRD_API lrd_status lrd_config_create(lrd_config** out);
LRD_API lrd_status lrd_config_load(const char* path, lrd_config** out);
LRD_API void lrd_config_free(lrd_config* cfg);
LRD_API lrd_status lrd_config_set(lrd_config* cfg, const char* key, const char* value);
LRD_API lrd_status lrd_config_to_json(const lrd_config* cfg, char** out);
/* Current value of one key, formatted as in the JSON rendering (strings unquoted). */
LRD_API lrd_status lrd_config_get(const lrd_config* cfg, const char* key, char** out);

/* Change points --------------------------------------------------------- */
/* k = 0 selects K by the elbow rule, k >= 1 forces k segments. */
LRD_API lrd_status lrd_segment(const lrd_series* s, const lrd_config* cfg, size_t k,
                               lrd_segmentation** out);
LRD_API void lrd_segmentation_free(lrd_segmentation* seg);
LRD_API size_t lrd_segmentation_k(const lrd_segmentation* seg);
/* Writes up to capacity change instants; returns the total count (K - 1). */
LRD_API size_t lrd_segmentation_taus(const lrd_segmentation* seg, size_t* taus, size_t capacity);
LRD_API double lrd_segmentation_contrast(const lrd_segmentation* seg);
LRD_API lrd_status lrd_segmentation_to_json(const lrd_segmentation* seg, char** out);

/* DFA ------------------------------------------------------------------- */
LRD_API lrd_status lrd_dfa(const lrd_series* s, const lrd_config* cfg, lrd_dfa_result** out);
LRD_API void lrd_dfa_free(lrd_dfa_result* r);
LRD_API double lrd_dfa_h(const lrd_dfa_result* r);
LRD_API lrd_status lrd_dfa_to_json(const lrd_dfa_result* r, char** out);
LRD_API lrd_status lrd_dfa_to_csv(const lrd_dfa_result* r, char** out);

/* Wavelets -------------------------------------------------------------- */
/* mode: "lrd" analyzes the series as given; "selfsimilar" and "band" analyze
 * its aggregated path. Band mode uses the configured band. With gof != 0 the
 * chi-squared test is attached; with suggest != 0 a band suggestion is added. */
LRD_API lrd_status lrd_wavelet(const lrd_series* s, const lrd_config* cfg, const char* mode,
                               int gof, int suggest, lrd_wavelet_result** out);
LRD_API void lrd_wavelet_free(lrd_wavelet_result* r);
LRD_API double lrd_wavelet_h(const lrd_wavelet_result* r);
/* Returns 1 if a test was run and stores its p-value, else 0. */
LRD_API int lrd_wavelet_gof_p(const lrd_wavelet_result* r, double* p_value);
LRD_API lrd_status lrd_wavelet_to_json(const lrd_wavelet_result* r, char** out);
LRD_API lrd_status lrd_wavelet_to_csv(const lrd_wavelet_result* r, char** out);

/* Pipeline -------------------------------------------------------------- */
LRD_API lrd_status lrd_analyze(const lrd_series* s, const lrd_config* cfg, const char* subject,
                               lrd_report** out);
/* Reads the file, cleans and resamples RR input, then analyzes. */
LRD_API lrd_status lrd_analyze_file(const char* path, const char* format, const lrd_config* cfg,
                                    lrd_report** out);
LRD_API void lrd_report_free(lrd_report* r);
LRD_API size_t lrd_report_phase_count(const lrd_report* r);
/* Wavelet estimate of phase i; returns 0 if that phase failed. */
LRD_API int lrd_report_phase_wavelet_h(const lrd_report* r, size_t i, double* h);
LRD_API lrd_status lrd_report_to_json(const lrd_report* r, char** out);
LRD_API lrd_status lrd_report_emit(const lrd_report* r, const char* out_dir);
/* ANOVA across subjects of the per-phase estimates. */
LRD_API lrd_status lrd_cohort_to_json(const lrd_report* const* reports, size_t count, char** out);

/* Monte Carlo ----------------------------------------------------------- */
/* regression: "ols" or "gls". threads = 0 uses every hardware thread. */
LRD_API lrd_status lrd_table1_run(const double* h_values, size_t h_count, size_t n, size_t reps,
                                  uint64_t seed, const char* regression, unsigned threads,
                                  lrd_table1** out);
LRD_API void lrd_table1_free(lrd_table1* t);
LRD_API lrd_status lrd_table1_to_text(const lrd_table1* t, char** out);
LRD_API lrd_status lrd_table1_to_csv(const lrd_table1* t, char** out);
LRD_API lrd_status lrd_table1_to_json(const lrd_table1* t, char** out);

#ifdef __cplusplus
}
#endif

#endif /* LRD_LRD_H */
