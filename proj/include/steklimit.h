/* steklimit — weighted Neumann-to-Steklov concentration limits on the disk
 * and transfer-mapped domains.
 *
 * C interface to the shared library: opaque handles, status codes, and a
 * thread-local error message. All functions return STEK_OK on success; on
 * failure the output parameters are left untouched and stek_last_error()
 * describes the problem.
 */
#ifndef STEKLIMIT_H
#define STEKLIMIT_H

#include <stdint.h>

#if defined(_WIN32)
#define STEK_API __declspec(dllexport)
#else
#define STEK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum stek_status {
    STEK_OK = 0,
    STEK_ERR_INVALID_ARGUMENT = 1, /* malformed input, bad spec string, bad config */
    STEK_ERR_DOMAIN = 2,           /* parameter outside its mathematical domain */
    STEK_ERR_SOLVER = 3,           /* iteration failed to converge / factorization failed */
    STEK_ERR_IO = 4,               /* file could not be read or written */
    STEK_ERR_INTERNAL = 5
} stek_status;

typedef struct stek_weight stek_weight;     /* concentrating weight family */
typedef struct stek_map stek_map;           /* transfer mapping */
typedef struct stek_mesh stek_mesh;         /* graded disk mesh */
typedef struct stek_solution stek_solution; /* eigensolve result */

STEK_API const char* stek_version(void);
/* Message for the most recent failure on this thread; empty string if none. */
STEK_API const char* stek_last_error(void);
/* Frees strings returned through char** output parameters. */
STEK_API void stek_string_free(char* s);

/* ---- concentrating weights -------------------------------------------- */

/* alpha_spec: "constant:V" | "fourier:c0,a1,b1,..." | "table:v0,v1,...". */
STEK_API stek_status stek_weight_create(const char* alpha_spec, int n, double a,
                                        stek_weight** out);
STEK_API void stek_weight_destroy(stek_weight* w);

STEK_API stek_status stek_weight_rho(const stek_weight* w, double r, double* out);
STEK_API stek_status stek_weight_radial_mass(const stek_weight* w, double* out);
STEK_API stek_status stek_weight_total_mass(const stek_weight* w, double* out);
STEK_API stek_status stek_weight_layer_sup(const stek_weight* w, double m, double* sup,
                                           double* argmax_r);
STEK_API stek_status stek_weight_beta_moment(const stek_weight* w, double s, double q,
                                             double* out);
/* min{1-1/p, 1-n/p+(n-1)/q}; STEK_ERR_DOMAIN outside the admissible range. */
STEK_API stek_status stek_delta_exponent(double p, double q, int n, double* out);

/* ---- transfer maps ----------------------------------------------------- */

/* map_spec: "identity" | "radial-power:S" | "conformal:C". */
STEK_API stek_status stek_map_create(const char* map_spec, stek_map** out);
STEK_API void stek_map_destroy(stek_map* m);

STEK_API stek_status stek_map_forward(const stek_map* m, double x, double y, double* u,
                                      double* v);
STEK_API stek_status stek_map_inverse(const stek_map* m, double u, double v, double* x,
                                      double* y);
STEK_API stek_status stek_map_jacobian(const stek_map* m, double x, double y, double* det);
STEK_API stek_status stek_map_boundary_derivative(const stek_map* m, double theta, double* out);

/* ---- meshes ------------------------------------------------------------ */

STEK_API stek_status stek_mesh_build(double h, double boundary_layer, stek_mesh** out);
STEK_API void stek_mesh_destroy(stek_mesh* m);
STEK_API stek_status stek_mesh_counts(const stek_mesh* m, int* vertices, int* triangles,
                                      int* boundary_edges);
STEK_API stek_status stek_mesh_write(const stek_mesh* m, const char* path);

/* ---- eigensolves ------------------------------------------------------- */

/* config_json follows the documented config schema (same as the CLI).
 * problem: "steklov" or "neumann"; a is the concentration parameter for the
 * Neumann side (ignored for Steklov). */
STEK_API stek_status stek_solve(const char* config_json, const char* problem, double a,
                                stek_solution** out);
STEK_API void stek_solution_destroy(stek_solution* s);
STEK_API stek_status stek_solution_lambda(const stek_solution* s, double* out);
STEK_API stek_status stek_solution_sharp_constant(const stek_solution* s, double* out);
STEK_API stek_status stek_solution_residual(const stek_solution* s, double* out);
STEK_API stek_status stek_solution_iterations(const stek_solution* s, long* out);
STEK_API stek_status stek_solution_multiplicity(const stek_solution* s, int* out);
STEK_API stek_status stek_solution_json(const stek_solution* s, char** out);

/* ---- experiment drivers ------------------------------------------------ */
/* Each takes the config JSON, writes CSV/JSON files when the config names an
 * output stem, and hands back the summary JSON. all_ok (when non-NULL) is set
 * to 1 when every internal check of the run passed. */

STEK_API stek_status stek_run_sweep(const char* config_json, char** summary_json, int* all_ok);
STEK_API stek_status stek_run_minimizer_sweep(const char* config_json, char** summary_json,
                                              int* all_ok);
STEK_API stek_status stek_run_quotient_comparison(const char* config_json, char** summary_json,
                                                  int* all_ok);
STEK_API stek_status stek_run_lemma_checks(char** report_text, char** summary_json, int* all_ok);
STEK_API stek_status stek_run_oracle(const char* config_json, char** summary_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* STEKLIMIT_H */
