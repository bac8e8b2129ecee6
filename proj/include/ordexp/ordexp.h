/* ordexp -- ordered exponential scale estimation under linex loss.
 *
 * C API of the shared library. All functions return an ordexp_status;
 * outputs go through pointers supplied by the caller. On failure,
 * ordexp_last_error() returns a thread-local human-readable detail
 * message. Handles are opaque and freed with the matching _destroy
 * function; strings returned through char** are freed with
 * ordexp_string_free().
 */
#ifndef ORDEXP_H
#define ORDEXP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32) && defined(ORDEXP_SHARED)
#if defined(ORDEXP_BUILD)
#define ORDEXP_API __declspec(dllexport)
#else
#define ORDEXP_API __declspec(dllimport)
#endif
#else
#define ORDEXP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define ORDEXP_VERSION_STRING "0.1.0"

/* Built-in defaults used by the table runner and the CLI. */
#define ORDEXP_DEFAULT_REPLICATIONS 50000u
#define ORDEXP_DEFAULT_SEED 20250810u

typedef enum ordexp_status {
    ORDEXP_OK = 0,
    ORDEXP_ERR_INVALID_ARGUMENT = 1, /* bad pointer, size, or value */
    ORDEXP_ERR_DOMAIN = 2,           /* math precondition violated */
    ORDEXP_ERR_DEGENERATE = 3,       /* degenerate statistic (T_i == 0) */
    ORDEXP_ERR_INCOMPATIBLE = 4,     /* estimator/statistics mismatch */
    ORDEXP_ERR_PARSE = 5,            /* configuration document invalid */
    ORDEXP_ERR_IO = 6,               /* filesystem failure */
    ORDEXP_ERR_INFINITE = 7,         /* requested quantity is infinite */
    ORDEXP_ERR_INTERNAL = 8
} ordexp_status;

/* The eight estimator families. The *_KNOWN / BSEE families act on
 * per-population sums with known (zero) locations; the *_UNKNOWN / BAEE
 * families act on residual sums with unknown locations. */
typedef enum ordexp_estimator {
    ORDEXP_EST_BSEE = 0,
    ORDEXP_EST_IMPROVED_BSEE = 1,
    ORDEXP_EST_RMLE_KNOWN = 2,
    ORDEXP_EST_IMPROVED_RMLE_KNOWN = 3,
    ORDEXP_EST_BAEE = 4,
    ORDEXP_EST_IMPROVED_BAEE = 5,
    ORDEXP_EST_RMLE_UNKNOWN = 6,
    ORDEXP_EST_IMPROVED_RMLE_UNKNOWN = 7
} ordexp_estimator;

typedef enum ordexp_format {
    ORDEXP_FORMAT_CSV = 0,
    ORDEXP_FORMAT_MARKDOWN = 1
} ordexp_format;

ORDEXP_API const char* ordexp_version(void);
ORDEXP_API const char* ordexp_status_name(ordexp_status status);
/* Detail message of the most recent failure on this thread ("" if none). */
ORDEXP_API const char* ordexp_last_error(void);
ORDEXP_API void ordexp_string_free(char* text);

/* ---- loss and closed-form coefficients ------------------------------- */

/* Linex loss exp(p*D) - p*D - 1 with D = (estimate - truth)/truth.
 * Requires p finite nonzero, truth > 0, estimate finite >= 0. On exp
 * overflow the loss saturates at DBL_MAX and *saturated (when non-NULL)
 * is set to 1. */
ORDEXP_API ordexp_status ordexp_linex_loss(double p, double estimate,
                                           double truth, double* loss,
                                           int* saturated);

/* p^-1 (1 - exp(-p/(n_i + 1))), n_i >= 1. */
ORDEXP_API ordexp_status ordexp_bsee_coefficient(uint32_t n_i, double p,
                                                 double* out);
/* p^-1 (1 - exp(-p/n_i)), n_i >= 2. */
ORDEXP_API ordexp_status ordexp_baee_coefficient(uint32_t n_i, double p,
                                                 double* out);
/* p^-1 (1 - exp(-p/(n_total + 1))), n_total >= 2. */
ORDEXP_API ordexp_status ordexp_truncation_coefficient_known(uint64_t n_total,
                                                             double p,
                                                             double* out);
/* p^-1 (1 - exp(-p/(n_total - k + 1))), k >= 2, n_total - k >= 1. */
ORDEXP_API ordexp_status ordexp_truncation_coefficient_unknown(
    uint64_t n_total, uint32_t k, double p, double* out);

/* ---- sufficient statistics ------------------------------------------- */

typedef struct ordexp_known_stats ordexp_known_stats;
typedef struct ordexp_unknown_stats ordexp_unknown_stats;

/* Known (zero) locations: k >= 2 populations, sample sizes n[i] >= 1 and
 * positive sums s[i]. */
ORDEXP_API ordexp_status ordexp_known_stats_create(size_t k,
                                                   const uint32_t* n,
                                                   const double* s,
                                                   ordexp_known_stats** out);
/* Builds sums from raw samples; samples[i] points at lengths[i] strictly
 * positive observations. */
ORDEXP_API ordexp_status ordexp_known_stats_from_samples(
    size_t k, const size_t* lengths, const double* const* samples,
    ordexp_known_stats** out);
ORDEXP_API void ordexp_known_stats_destroy(ordexp_known_stats* stats);

/* Unknown locations: sample sizes n[i] >= 2, sample minima and residual
 * sums t[i] >= 0 (a zero marks the statistics degenerate; estimators then
 * fail with ORDEXP_ERR_DEGENERATE). */
ORDEXP_API ordexp_status ordexp_unknown_stats_create(
    size_t k, const uint32_t* n, const double* xmin, const double* t,
    ordexp_unknown_stats** out);
ORDEXP_API ordexp_status ordexp_unknown_stats_from_samples(
    size_t k, const size_t* lengths, const double* const* samples,
    ordexp_unknown_stats** out);
ORDEXP_API void ordexp_unknown_stats_destroy(ordexp_unknown_stats* stats);

/* ---- estimator evaluation -------------------------------------------- */

/* Evaluates a sum-statistic estimator (BSEE family / known-location RMLE)
 * on the statistics; out receives k components. */
ORDEXP_API ordexp_status ordexp_estimate_known(const ordexp_known_stats* stats,
                                               ordexp_estimator estimator,
                                               double p, double* out);
/* Evaluates a residual-sum estimator (BAEE family / unknown-location
 * RMLE). */
ORDEXP_API ordexp_status ordexp_estimate_unknown(
    const ordexp_unknown_stats* stats, ordexp_estimator estimator, double p,
    double* out);

/* ---- Monte Carlo risk ------------------------------------------------- */

typedef struct ordexp_scenario ordexp_scenario;

/* Population truth for a simulation: k >= 2 populations with sample sizes
 * n, locations mu (NULL means all zero), positive nondecreasing scales
 * sigma, linex shape p, replication count >= 1, reproducibility seed. */
ORDEXP_API ordexp_status ordexp_scenario_create(
    size_t k, const uint32_t* n, const double* mu, const double* sigma,
    double p, uint64_t replications, uint64_t seed, ordexp_scenario** out);
ORDEXP_API void ordexp_scenario_destroy(ordexp_scenario* scenario);

/* Monte Carlo risk of one estimator. mean_loss and std_error receive k
 * values; overflow_count / degenerate_count may be NULL. Replication r
 * draws from a substream keyed by (seed, r), so results are bit-identical
 * for any `threads` value (0 = hardware default). */
ORDEXP_API ordexp_status ordexp_estimate_risk(
    const ordexp_scenario* scenario, ordexp_estimator estimator,
    uint32_t threads, double* mean_loss, double* std_error,
    uint64_t* overflow_count, uint64_t* degenerate_count);

/* Percentage relative risk improvement 100*(base - new)/base, requiring
 * every base component > 0. */
ORDEXP_API ordexp_status ordexp_prri(size_t k, const double* risk_new,
                                     const double* risk_base, double* out);

/* Exact linex risk of c*S with S/sigma ~ Gamma(n, 1). Returns
 * ORDEXP_ERR_INFINITE (and sets *out to +inf) when p*c >= 1. */
ORDEXP_API ordexp_status ordexp_closed_form_bsee_risk(uint32_t n, double p,
                                                      double c, double* out);

/* ---- experiment grids -------------------------------------------------- */

/* Runs one of the four reference grids (36 rows x 6 PRRI columns) and
 * returns the rendered CSV or markdown through *out_text. Telemetry
 * pointers may be NULL. */
ORDEXP_API ordexp_status ordexp_run_table(uint32_t table_id,
                                          uint64_t replications,
                                          uint64_t seed, ordexp_format format,
                                          uint32_t threads, char** out_text,
                                          uint64_t* degenerate_count,
                                          uint64_t* overflow_count);

/* Parses and runs a JSON experiment configuration. *out_text receives the
 * rendered result; *out_path (when non-NULL) receives the configured
 * output path, or NULL when the config wants stdout. */
ORDEXP_API ordexp_status ordexp_run_config(const char* config_text,
                                           uint32_t threads, char** out_text,
                                           char** out_path,
                                           uint64_t* degenerate_count,
                                           uint64_t* overflow_count,
                                           int* degenerate_budget_exceeded);

#ifdef __cplusplus
}
#endif

#endif /* ORDEXP_H */
