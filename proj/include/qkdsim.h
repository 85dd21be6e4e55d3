/* C interface to the QKD relaxation-noise simulator.
 *
 * Conventions:
 *   - Every fallible call returns a qkd_status_t; QKD_OK is 0.
 *   - On failure, qkd_last_error() returns a thread-local message that
 *     stays valid until the next failing call on the same thread.
 *   - Objects returned through out-parameters are owned by the caller:
 *     handles are released with their matching *_free, strings with
 *     qkd_string_free.
 *   - Times are nanoseconds; seeds are 64-bit; `lambda` is the decay
 *     fraction 1 - exp(-t / T1) in [0, 1].
 */
#ifndef QKDSIM_H
#define QKDSIM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define QKD_API __declspec(dllexport)
#else
#define QKD_API __attribute__((visibility("default")))
#endif

typedef enum qkd_status {
    QKD_OK = 0,
    QKD_ERR_INVALID_ARGUMENT = 1, /* bad parameter or configuration */
    QKD_ERR_INVARIANT = 2,        /* a numerical contract failed internally */
    QKD_ERR_INSUFFICIENT_DATA = 3, /* not enough rounds to evaluate */
    QKD_ERR_INTERNAL = 4          /* unexpected failure */
} qkd_status_t;

/* Human-readable name of a status code; static storage. */
QKD_API const char* qkd_status_name(qkd_status_t status);

/* Message from the most recent failing call on this thread ("" if none). */
QKD_API const char* qkd_last_error(void);

/* Library version string, e.g. "0.1.0"; static storage. */
QKD_API const char* qkd_version(void);

/* Default relaxation time constant, ns. */
QKD_API double qkd_default_t1(void);

/* lambda = 1 - exp(-t / T1). t may be infinite (lambda = 1). */
QKD_API qkd_status_t qkd_lambda_from_time(double t_ns, double t1_ns, double* lambda_out);

/* t = -T1 ln(1 - lambda); infinite at lambda = 1. */
QKD_API qkd_status_t qkd_time_from_lambda(double lambda, double t1_ns, double* t_ns_out);

/* ---- sweeps ---------------------------------------------------------- */

typedef enum qkd_protocol {
    QKD_PROTOCOL_BB84_ZX = 0,
    QKD_PROTOCOL_BB84_XY = 1,
    QKD_PROTOCOL_E91_PHI_PLUS = 2,
    QKD_PROTOCOL_E91_PSI_PLUS = 3,
    QKD_PROTOCOL_CHSH_PSI_MINUS = 4
} qkd_protocol_t;

typedef struct qkd_sweep_config {
    qkd_protocol_t protocol;
    double t_start_ns;
    double t_end_ns;
    int steps;
    double t1_ns;
    long long shots; /* sifted rounds (BB84) or pairs (E91) per grid point */
    unsigned long long seed;
} qkd_sweep_config_t;

/* A config filled with the library defaults (bb84_zx, 0..5*T1, 50 steps,
 * 1e5 shots, seed 1). */
QKD_API qkd_sweep_config_t qkd_sweep_config_default(void);

typedef struct qkd_sweep_result qkd_sweep_result_t; /* opaque */

typedef struct qkd_sweep_row {
    double t_ns;
    double lambda;
    const char* quantity; /* borrowed from the result handle */
    double analytic;
    double empirical;
    double std_error;
    long long shots; /* denominator behind the empirical column */
} qkd_sweep_row_t;

QKD_API qkd_status_t qkd_sweep_run(const qkd_sweep_config_t* config, qkd_sweep_result_t** out);
QKD_API long long qkd_sweep_row_count(const qkd_sweep_result_t* result);
QKD_API qkd_status_t qkd_sweep_row(const qkd_sweep_result_t* result, long long index,
                                   qkd_sweep_row_t* row_out);

/* CSV with header t_ns,lambda,quantity,analytic,empirical,std_error,shots;
 * numbers carry 17 significant digits and are locale independent. */
QKD_API qkd_status_t qkd_sweep_csv(const qkd_sweep_result_t* result, char** csv_out);

/* Gates every row's empirical estimate against its analytic null at a
 * z_threshold-sigma tail probability (exact binomial tails for thin cells,
 * exact agreement where the null is deterministic). pass_out is 1/0;
 * report_out (optional) receives a printable summary. */
QKD_API qkd_status_t qkd_sweep_compare(const qkd_sweep_result_t* result, double z_threshold,
                                       int* pass_out, char** report_out);

QKD_API void qkd_sweep_free(qkd_sweep_result_t* result);
QKD_API void qkd_string_free(char* s);

/* ---- guessing-strategy evaluation ------------------------------------ */

typedef enum qkd_variant { QKD_VARIANT_ZX = 0, QKD_VARIANT_XY = 1 } qkd_variant_t;

typedef struct qkd_eve_report {
    double analytic;
    double brute_force;
    double monte_carlo;
    double mc_std_error;
    double epsilon; /* analytic advantage over the blind 1/4 */
    long long sifted_rounds;
    char strategy_name[32];
    double strategy_probs[4]; /* over the variant's states in basis order */
} qkd_eve_report_t;

/* Evaluates the variant's biased guessing strategy at the given decay
 * fraction: closed form, numeric enumeration, and a seeded simulation. */
QKD_API qkd_status_t qkd_eve_evaluate(qkd_variant_t variant, double lambda, long long sifted_rounds,
                                      unsigned long long seed, qkd_eve_report_t* report_out);

/* ---- CHSH ------------------------------------------------------------ */

typedef enum qkd_bell {
    QKD_BELL_PHI_PLUS = 0,
    QKD_BELL_PHI_MINUS = 1,
    QKD_BELL_PSI_PLUS = 2,
    QKD_BELL_PSI_MINUS = 3
} qkd_bell_t;

typedef enum qkd_chsh_band {
    QKD_BAND_SECURE = 0,       /* S at the quantum bound 2*sqrt(2) */
    QKD_BAND_POST_PROCESS = 1, /* 2 < S < 2*sqrt(2) */
    QKD_BAND_DISCARD = 2       /* S <= 2 */
} qkd_chsh_band_t;

typedef struct qkd_chsh_report {
    double s_analytic;
    qkd_chsh_band_t band; /* classification of the analytic S */
    /* Pair order: (A1,B3), (A1,B2), (A2,B3), (A2,B2). */
    double corr_analytic[4];
    /* Filled when pairs > 0; otherwise zero with empirical = 0. */
    int empirical; /* 1 if a simulation was run */
    double s_empirical;
    double s_std_error;
    double corr_empirical[4];
    long long pair_counts[4];
} qkd_chsh_report_t;

/* CHSH S for the evolved Bell state after idling t_ns. With pairs > 0 an
 * E91 simulation of that many source pairs adds empirical estimates. */
QKD_API qkd_status_t qkd_chsh_evaluate(qkd_bell_t source, double t_ns, double t1_ns,
                                       long long pairs, unsigned long long seed,
                                       qkd_chsh_report_t* report_out);

/* ---- self verification ------------------------------------------------ */

/* Runs the analytic invariant suites. all_passed_out is 1/0; report_out
 * (optional) receives the per-suite table. */
QKD_API qkd_status_t qkd_verify(int* all_passed_out, char** report_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* QKDSIM_H */
