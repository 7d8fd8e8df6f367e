/*
 * facnum — factor-count estimation from the singular values of lag-1
 * sample autocovariance matrices.
 *
 * C binary interface of the shared library. All functions return a
 * facnum_status; outputs go through pointers. On failure a thread-local
 * message is available from facnum_last_error(). Handles are opaque and
 * must be released with their matching _free function. Strings returned
 * through char** are heap-allocated; release them with facnum_string_free.
 *
 * The larger operations (estimate, simulate, multistep) take their options
 * and return their reports as JSON documents; the schemas are documented in
 * the project README.
 */
#ifndef FACNUM_H
#define FACNUM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    FACNUM_OK = 0,
    FACNUM_ERR_DOMAIN = 1,    /* invalid value for a mathematical argument */
    FACNUM_ERR_CONFIG = 2,    /* invalid option / configuration */
    FACNUM_ERR_IO = 3,        /* file could not be read, parsed or written */
    FACNUM_ERR_INTERNAL = 4,  /* unexpected failure */
} facnum_status;

const char* facnum_status_name(facnum_status status);

/* Message describing the most recent failure on this thread ("" if none). */
const char* facnum_last_error(void);

void facnum_string_free(char* s);

/* ---- limiting spectral law ------------------------------------------- */

/* Support edges of the noise eigenvalue law at aspect ratio y = p/T. */
facnum_status facnum_lsd_edges(double y, double* a, double* b);

/* Edge value T(b+) of the T-transform. */
facnum_status facnum_t_at_b_plus(double y, double* t);

/* z(t) = (t+1)(t+y)^2/t, the inverse of the T-transform branch. */
facnum_status facnum_z_of_t(double t, double y, double* z);

/* T(z) for z above the right edge. */
facnum_status facnum_t_transform(double z, double y, double* t);

/* Stieltjes transform at z = z_re + i z_im (z_im >= 0). */
facnum_status facnum_stieltjes_m(double z_re, double z_im, double y,
                                 double* m_re, double* m_im);

/* Density of the continuous spectral part at x > 0, and the mass of the
 * atom at the origin of the companion law. */
facnum_status facnum_lsd_density(double x, double y, double* density);
facnum_status facnum_lsd_atom_mass(double y, double* mass);

/* ---- phase transition -------------------------------------------------- */

/* Detectability of one factor: smaller transition root t1, whether the
 * factor produces an outlier, and the outlier location lambda in units of
 * sigma2^2 (lambda = b when not significant). Any output pointer may be
 * NULL. */
facnum_status facnum_spike_limit(double gamma0, double gamma1, double sigma2,
                                 double y, double* t1, int* significant,
                                 double* lambda);

/* Region characterization of the same test (1 = significant). */
facnum_status facnum_is_significant(double gamma0, double gamma1, double sigma2,
                                    double y, int* significant);

/* Corner tau0 and sufficient strength level tau1 = y/T(b+). */
facnum_status facnum_region_bounds(double y, double* tau0, double* tau1);

typedef struct {
    int32_t curve_id;
    double gamma0_snr;
    double gamma1_snr;
} facnum_boundary_point;

/* Boundary curves of the detectability diagram, n_points per curve. The
 * array is allocated by the library; free it with facnum_boundary_free. */
facnum_status facnum_detectability_boundary(double y, int n_points,
                                            facnum_boundary_point** points,
                                            size_t* n_out);
void facnum_boundary_free(facnum_boundary_point* points);

/* ---- panels and spectra ------------------------------------------------ */

typedef struct facnum_panel facnum_panel;
typedef struct facnum_spectrum facnum_spectrum;

/* Builds a panel from a dense buffer laid out series-major: data[i*n_obs+t]
 * is series i at time t. */
facnum_status facnum_panel_create(const double* data, int64_t p, int64_t n_obs,
                                  facnum_panel** out);

/* Reads a CSV panel (rows = time points unless transpose != 0); demean != 0
 * subtracts each series mean. */
facnum_status facnum_panel_read_csv(const char* path, int transpose, int demean,
                                    facnum_panel** out);

facnum_status facnum_panel_write_csv(const facnum_panel* panel, const char* path);

facnum_status facnum_panel_dims(const facnum_panel* panel, int64_t* p, int64_t* n_obs);

/* Synthetic panel from a preset scenario ("I".."IV"). */
facnum_status facnum_generate_scenario_panel(const char* scenario, int64_t p,
                                             int64_t t_len, uint64_t seed,
                                             facnum_panel** out);

void facnum_panel_free(facnum_panel* panel);

/* Squared singular values of the lag-1 autocovariance of the panel. */
facnum_status facnum_panel_spectrum(const facnum_panel* panel, facnum_spectrum** out);

/* Number of retained eigenvalues (min(p, T)). */
facnum_status facnum_spectrum_size(const facnum_spectrum* s, int64_t* n);

/* Copies up to buf_len leading eigenvalues (descending) or consecutive
 * ratios into buf; n_written reports how many were copied. */
facnum_status facnum_spectrum_eigenvalues(const facnum_spectrum* s, double* buf,
                                          int64_t buf_len, int64_t* n_written);
facnum_status facnum_spectrum_ratios(const facnum_spectrum* s, double* buf,
                                     int64_t buf_len, int64_t* n_written);

void facnum_spectrum_free(facnum_spectrum* s);

/* ---- estimators --------------------------------------------------------- */

/* Threshold estimator. search_cap <= 0 selects the full ratio range;
 * require_two != 0 demands two consecutive ratios above 1 - d_t.
 * saturated reports that no index qualified (k then equals the cap). */
facnum_status facnum_k_hat(const facnum_spectrum* s, double d_t, int64_t search_cap,
                           int require_two, int64_t* k, int* saturated);

/* Argmin-of-ratios estimator; search_cap <= 0 selects min(p,T)/2. */
facnum_status facnum_k_tilde(const facnum_spectrum* s, int64_t search_cap, int64_t* k);

/* ---- calibration -------------------------------------------------------- */

typedef struct {
    int64_t p;
    int64_t t_len;
    int64_t reps;
    double quantile_level;
    double q;
    double d_t;
    uint64_t seed;
} facnum_calibration_report;

/* Monte-Carlo calibration of d_T for panel shape (p, T). reps <= 0 selects
 * 2000, quantile_level <= 0 selects 0.005, threads <= 0 selects auto. */
facnum_status facnum_calibrate(int64_t p, int64_t t_len, int64_t reps,
                               double quantile_level, uint64_t seed, int threads,
                               facnum_calibration_report* out);

/* ---- JSON-level operations ---------------------------------------------- */

/* Estimation report for a panel. options_json keys (all optional):
 *   "method": "kstar" | "khat" | "ktilde" | "multistep"   (default "kstar")
 *   "d_t": number in (0,1)      threshold, exclusive with "calibrate"
 *   "calibrate": bool           calibrate d_T at the panel's (p,T)
 *   "calibrate_reps", "quantile_level", "seed", "threads", "search_cap",
 *   "max_steps" (multistep, default 3)
 * Returns the report as JSON in *report_json. */
facnum_status facnum_estimate_json(const facnum_panel* panel, const char* options_json,
                                   char** report_json);

/* Monte-Carlo frequency study. options_json keys:
 *   "scenario": "I".."IV" or "custom"
 *   "p", "t_len": integers (required)
 *   "custom": {"theta": [...], "gamma_diag": [...], "delta": [...], "sigma2": x}
 *   "reps" (default 1000), "method" ("kstar"|"khat"|"ktilde"|"ktilde3"),
 *   "seed", "threads"
 * Returns the MC result (histogram, decision frequencies, calibration) as
 * JSON. */
facnum_status facnum_simulate_json(const char* options_json, char** report_json);

/* Theoretical limit table for a scenario; same scenario keys as simulate. */
facnum_status facnum_limits_json(const char* options_json, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* FACNUM_H */
