/* fracsob — fractional-Sobolev numerics on periodic grids.
 *
 * C interface to the core library: opaque handles, integer status codes,
 * and a thread-local error message. Strings returned through char** out
 * parameters are heap-allocated; release them with fs_string_free.
 */
#ifndef FRACSOB_H
#define FRACSOB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct fs_grid fs_grid;
typedef struct fs_func fs_func;

enum fs_status {
    FS_OK = 0,
    FS_FAIL = 1,         /* experiment ran, criteria not met */
    FS_ERR_CONFIG = 2,   /* invalid parameters, parse failure, domain error */
    FS_ERR_NUMERIC = 3,  /* solver or quadrature failure */
    FS_ERR_INTERNAL = 4
};

/* Message for the most recent failure on this thread. */
const char* fs_last_error(void);

void fs_string_free(char* s);

/* ---- grids and functions ---- */

/* dim in {1,2}; points_per_axis a power of two >= 4. */
int fs_grid_create(int dim, int points_per_axis, fs_grid** out);
void fs_grid_destroy(fs_grid* grid);
int fs_grid_dim(const fs_grid* grid);
int fs_grid_points_per_axis(const fs_grid* grid);

/* function_spec mini-format:
 *   rand:band=8,seed=7[,zero-mean]   seeded band-limited, reproducible
 *   bump:c=0.5,w=0.1                 periodized Gaussian bump
 *   ind:[0.2,0.5)                    indicator (dim 2: [a,b)x[c,d))
 *   spec:{k=1:1,k=-1:1}              explicit coefficients
 *   spec:file=coeffs.json            JSON array of {"k":[..],"re":..,"im":..}
 * any form may end with ,l2=<value> to normalize the L2 norm. */
int fs_func_synthesize(const fs_grid* grid, const char* function_spec, fs_func** out);
void fs_func_destroy(fs_func* f);
size_t fs_func_size(const fs_func* f);
/* Row-major samples; either output pointer may be NULL. Buffers must hold
 * fs_func_size(f) doubles. */
int fs_func_samples(const fs_func* f, double* re, double* im);

/* ---- norms and operators ---- */

/* space_spec: Lp:p=2  W1p:p=2  Hsp:s=0.5,p=2  Wsp:s=0.5,p=2  Holder:mu=0.25
 *             BMO  Camp:p=2,lam=1  Lorentz:p=4,q=2  Sum  Max:p0=1,p1=inf */
int fs_norm(const fs_func* f, const char* space_spec, double* out);

/* op_spec: bessel:s=0.5[,t=1]  riesz:s=0.25  rieszt:j=0  dgrad:s=0.5,j=0
 * (riesz/rieszt/dgrad accept ,project to drop a nonzero mean). */
int fs_potential(const fs_func* f, const char* op_spec, fs_func** out);

/* Kernel value G_s(|x|) for s > 0, n in {1,2}. */
int fs_bessel_kernel(double x_abs, double s, int n, double* out);

/* Weighted sequence norm (sum_m (2^(m s) |x_m|)^q)^(1/q); q may be INFINITY. */
int fs_sequence_norm_lsq(const double* abs_values, size_t len, double s, double q,
                         double* out);

/* ---- rearrangement and K-functionals ---- */

/* CSV "t_right,value" rows of the decreasing rearrangement steps. */
int fs_rearrangement_csv(const fs_func* f, char** csv_out);

/* couple_spec: L1-Linf | Lp-W1p:p=2 | L2-Hs2:s=0.5, each optionally with
 * ,tmin=..,tmax=..,perdecade=..  CSV columns: t,K,split_norm0,split_norm1
 * (L2-Hs2 adds K2,sqrt2K2). Curve shape is validated before emission. */
int fs_kcurve_csv(const fs_func* f, const char* couple_spec, char** csv_out);

/* ---- experiments ---- */

/* config_json keys: tag (required), n, N, s, t, p, q, mu, s0, s1, seed,
 * ensemble, threads, tol_identity, tol_drift, refine. Unknown keys are
 * rejected. On success *pass reports the verdict and the report-v1 JSON and
 * per-member CSV are returned. Returns FS_OK even when *pass == 0. */
int fs_experiment_run(const char* config_json, char** report_json, char** member_csv,
                      int* pass);

/* Runs the default battery. config_json keys: seed, N, threads (all
 * optional). Writes <tag-id>.report.json and <tag-id>.per_member.csv under
 * out_dir, returns a summary CSV, sets *all_pass. */
int fs_suite_all(const char* config_json, const char* out_dir, char** summary_csv,
                 int* all_pass);

#ifdef __cplusplus
}
#endif

#endif /* FRACSOB_H */
