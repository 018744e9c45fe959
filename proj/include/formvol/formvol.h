#ifndef FORMVOL_FORMVOL_H
#define FORMVOL_FORMVOL_H

/* C interface to libformvol. Every function returns an fv_status; on
 * failure the message is available from fv_last_error() on the calling
 * thread until the next failing call. Handles are opaque and owned by the
 * caller, who releases them with the matching *_free function. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FV_API __declspec(dllexport)
#else
#define FV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fv_status {
  FV_OK = 0,
  FV_ERR_SHAPE = 1,
  FV_ERR_DOMAIN = 2,
  FV_ERR_CAPACITY = 3,
  FV_ERR_NUMERIC = 4,
  FV_ERR_INVALID_CERTIFICATE = 5,
  FV_ERR_NOT_INVARIANT = 6,
  FV_ERR_INITIALIZATION = 7,
  FV_ERR_PARSE = 8,
  FV_ERR_IO = 9,
  FV_ERR_INVALID_ARGUMENT = 10,
  FV_ERR_INTERNAL = 11
} fv_status;

typedef enum fv_volume_method { FV_VOLUME_LAPLACE = 0, FV_VOLUME_SPHERICAL = 1, FV_VOLUME_EXACT = 2 } fv_volume_method;

typedef enum fv_norm_kind {
  FV_NORM_BOMBIERI = 0,
  FV_NORM_L1 = 1, /* l1 norm of monomial coefficients */
  FV_NORM_LP = 2, /* L^p on the sphere */
  FV_NORM_SUP = 3,
  FV_NORM_NUCLEAR = 4,
  FV_NORM_SCHATTEN = 5, /* of a Gram matrix */
  FV_NORM_SPECTRAL = 6  /* of a Gram matrix */
} fv_norm_kind;

typedef struct fv_form fv_form;
typedef struct fv_gram fv_gram;
typedef struct fv_report fv_report;

FV_API const char* fv_version(void);
FV_API const char* fv_last_error(void);
FV_API const char* fv_status_string(fv_status status);

/* Forms. Coefficients follow the graded-lex order, descending in x1. */
FV_API fv_status fv_form_builtin(const char* name, int n, int d, fv_form** out); /* "ball" or "powers" */
FV_API fv_status fv_form_from_coeffs(int n, int d, const double* coeffs, size_t len, int monomial_basis,
                                     fv_form** out);
FV_API fv_status fv_form_from_json(const char* text, fv_form** out);
FV_API fv_status fv_form_load(const char* path, fv_form** out);
FV_API fv_status fv_form_save(const fv_form* f, const char* path);
FV_API void fv_form_free(fv_form* f);

FV_API int fv_form_variables(const fv_form* f);
FV_API int fv_form_degree(const fv_form* f);
FV_API size_t fv_form_size(const fv_form* f);
/* Rescaled-basis coefficients; `len` must equal fv_form_size. */
FV_API fv_status fv_form_coeffs(const fv_form* f, double* out, size_t len);
FV_API fv_status fv_form_evaluate(const fv_form* f, const double* x, size_t n, double* out);
/* Caller frees the returned string with fv_string_free. */
FV_API fv_status fv_form_to_json(const fv_form* f, char** out);
FV_API void fv_string_free(char* s);

/* Gram matrices, row-major N x N with N = fv_gram_dimension(n, d). */
FV_API fv_status fv_gram_dimension(int n, int d, size_t* out);
FV_API fv_status fv_gram_from_entries(int n, int d, const double* entries, size_t len, fv_gram** out);
FV_API fv_status fv_gram_identity(int n, int d, fv_gram** out);
FV_API fv_status fv_gram_load(const char* path, fv_gram** out);
FV_API fv_status fv_gram_to_form(const fv_gram* g, fv_form** out);
FV_API void fv_gram_free(fv_gram* g);

typedef struct fv_volume_estimate {
  double value; /* +inf when infinite != 0 */
  double std_error;
  uint64_t samples;
  uint64_t seed;
  fv_volume_method method;
  int infinite;
} fv_volume_estimate;

/* FV_VOLUME_EXACT handles degree 2 and multiples of the ball form. */
FV_API fv_status fv_volume(const fv_form* f, fv_volume_method method, uint64_t samples, uint64_t seed,
                           fv_volume_estimate* out);
FV_API fv_status fv_ball_volume(int n, double* out);
FV_API fv_status fv_kappa(int n, int d, double* out);

typedef struct fv_norm_estimate {
  double value;
  double std_error; /* zero for exact values and sphere searches */
  uint64_t samples;
} fv_norm_estimate;

/* Form norms. The nuclear norm is available for multiples of the ball form
 * only; other forms need a certificate. */
FV_API fv_status fv_form_norm(const fv_form* f, fv_norm_kind kind, double p, uint64_t samples, uint64_t seed,
                              fv_norm_estimate* out);
/* Schatten (p >= 1, p = INFINITY allowed) or spectral norm of a Gram matrix. */
FV_API fv_status fv_gram_norm(const fv_gram* g, fv_norm_kind kind, double p, double* out);
/* Sum of |weights| of a checked decomposition f = sum w_k (y_k . x)^d;
 * `directions` holds count * n unit vectors. */
FV_API fv_status fv_nuclear_upper_bound(const fv_form* f, const double* weights, const double* directions,
                                        size_t count, double tol, double* out);

FV_API fv_status fv_theoretical_opt(fv_norm_kind kind, double p, int n, int d, double* out);

typedef struct fv_optimize_config {
  fv_norm_kind norm; /* BOMBIERI or L1 for forms; SCHATTEN or SPECTRAL for SOS */
  double p;
  int n;
  int d;
  int iters;
  uint64_t samples;
  uint64_t max_samples;
  uint64_t eval_samples;
  uint64_t seed;
  double step;
  const fv_form* start;      /* optional */
  const fv_gram* start_gram; /* optional, SOS only */
  int with_trace;
} fv_optimize_config;

typedef struct fv_verify_config {
  fv_norm_kind norm;
  double p;
  int n;
  int d;
  int trials;
  uint64_t samples;
  uint64_t seed;
  double tol;
  int threads;
  double bound_scale;
} fv_verify_config;

FV_API void fv_optimize_config_init(fv_optimize_config* config);
FV_API void fv_verify_config_init(fv_verify_config* config);

FV_API fv_status fv_optimize(const fv_optimize_config* config, fv_report** out);
FV_API fv_status fv_verify(const fv_verify_config* config, fv_report** out);
/* Checks that the ball form normalizes to exp(-kappa |x|^d) and that the
 * optimum of the probabilistic problem is kappa ||b||. */
FV_API fv_status fv_verify_pstar(fv_norm_kind kind, double p, int n, int d, uint64_t samples, uint64_t seed,
                                 fv_report** out);

/* 1 if the report is a passing verification or a finished optimization. */
FV_API int fv_report_passed(const fv_report* r);
/* JSON text owned by the report. */
FV_API const char* fv_report_json(const fv_report* r);
FV_API void fv_report_free(fv_report* r);

#ifdef __cplusplus
}
#endif

#endif
