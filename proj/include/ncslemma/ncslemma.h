#ifndef NCSLEMMA_H
#define NCSLEMMA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(NCSLEMMA_BUILDING)
#    define NCS_API __declspec(dllexport)
#  else
#    define NCS_API __declspec(dllimport)
#  endif
#else
#  define NCS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ncs_status {
  NCS_OK = 0,
  NCS_ERR_NULL_ARGUMENT = 1,
  NCS_ERR_INVALID_INPUT = 2,
  NCS_ERR_PARSE = 3,
  NCS_ERR_SHAPE = 4,
  NCS_ERR_DIMENSION_TOO_LARGE = 5,
  NCS_ERR_ASYMMETRIC = 6,
  NCS_ERR_SYMMETRY_BROKEN = 7,
  NCS_ERR_NOT_PSD = 8,
  NCS_ERR_NOT_GLOBALLY_PSD = 9,
  NCS_ERR_SLATER = 10,
  NCS_ERR_PRECONDITION = 11,
  NCS_ERR_SPLIT_FAILED = 12,
  NCS_ERR_VERIFICATION_FAILED = 13,
  NCS_ERR_WITNESS = 14,
  NCS_ERR_INTERNAL = 15
} ncs_status;

typedef enum ncs_outcome {
  NCS_PSD = 0,
  NCS_NOT_PSD = 1,
  NCS_CERTIFICATE = 2,
  NCS_COUNTEREXAMPLE = 3,
  NCS_INCONCLUSIVE = 4,
  NCS_INFEASIBLE = 5,
  NCS_VERIFIED = 6,
  NCS_REJECTED = 7,
  NCS_EVALUATED = 8
} ncs_outcome;

typedef struct ncs_options {
  double tol;
  double tol_strict;
  uint64_t budget;
  uint64_t seed;
  uint32_t threads;
} ncs_options;

/* Opaque handles, released with the matching _free. */
typedef struct ncs_poly ncs_poly;
typedef struct ncs_tuple ncs_tuple;
typedef struct ncs_instance ncs_instance;
typedef struct ncs_result ncs_result;

NCS_API const char* ncs_version(void);
/* Message of the last failing call on this thread; "" if none. */
NCS_API const char* ncs_last_error(void);
NCS_API const char* ncs_status_name(ncs_status s);
NCS_API void ncs_options_default(ncs_options* out);

/* Process exit code for a finished command (status NCS_OK) or a failure. */
NCS_API int ncs_exit_code(ncs_status status, ncs_outcome outcome);

/* ---- polynomials and tuples ---- */

/* coefficients: the mq x mq coefficient matrix, row-major. */
NCS_API ncs_status ncs_poly_create(size_t m, size_t q, const double* coefficients, ncs_poly** out);
NCS_API ncs_status ncs_poly_from_json(const char* text, ncs_poly** out);
NCS_API void ncs_poly_free(ncs_poly* p);
NCS_API ncs_status ncs_poly_dims(const ncs_poly* p, size_t* m, size_t* q);
/* out must hold (mq)^2 doubles. */
NCS_API ncs_status ncs_poly_coefficients(const ncs_poly* p, double* out);

/* data: m consecutive row-major n x n matrices. general != 0 allows
   non-symmetric matrices (hereditary evaluation). */
NCS_API ncs_status ncs_tuple_create(size_t m, size_t n, int general, const double* data,
                                    ncs_tuple** out);
NCS_API void ncs_tuple_free(ncs_tuple* x);

/* out must hold (qn)^2 doubles. */
NCS_API ncs_status ncs_evaluate(const ncs_poly* p, const ncs_tuple* x, double* out);
NCS_API ncs_status ncs_is_globally_psd(const ncs_poly* p, double tol, int* psd,
                                       double* lambda_min);

/* ---- instance files and commands ---- */

NCS_API ncs_status ncs_instance_parse(const char* text, ncs_instance** out);
NCS_API void ncs_instance_free(ncs_instance* in);
/* "positivity", "slemma", "slemma-hereditary", "scalar-slemma" or "homogenize". */
NCS_API const char* ncs_instance_kind(const ncs_instance* in);
/* Options stored in the instance file, defaults for missing fields. */
NCS_API ncs_status ncs_instance_options(const ncs_instance* in, ncs_options* out);

NCS_API ncs_status ncs_check_positivity(const ncs_instance* in, const ncs_options* o, int want_sos,
                                        ncs_result** out);
NCS_API ncs_status ncs_slemma(const ncs_instance* in, const ncs_options* o, int hereditary,
                              ncs_result** out);
NCS_API ncs_status ncs_scalar_slemma(const ncs_instance* in, const ncs_options* o,
                                     ncs_result** out);
NCS_API ncs_status ncs_homogenize(const ncs_instance* in, const ncs_options* o, ncs_result** out);
NCS_API ncs_status ncs_verify(const char* certificate_text, const ncs_instance* in,
                              const ncs_options* o, ncs_result** out);
NCS_API ncs_status ncs_evaluate_instance(const ncs_instance* in, const ncs_options* o,
                                         const char* tuple_text, int project, ncs_result** out);

NCS_API ncs_outcome ncs_result_outcome(const ncs_result* r);
/* Valid until the result is freed. indent < 0 gives compact output. */
NCS_API const char* ncs_result_json(ncs_result* r, int indent);
NCS_API const char* ncs_result_report(const ncs_result* r);
NCS_API void ncs_result_free(ncs_result* r);

#ifdef __cplusplus
}
#endif

#endif
