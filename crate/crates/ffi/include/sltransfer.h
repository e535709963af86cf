#ifndef SLTRANSFER_H
#define SLTRANSFER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SlStatus {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  SL_STATUS_CONFIG = 2,
  SL_STATUS_PRECONDITION = 3,
  SL_STATUS_OVERFLOW = 4,
  SL_STATUS_POLE = 5,
  SL_STATUS_DOUBLE_ROOT = 6,
  SL_STATUS_MISSED_ROOTS = 7,
  SL_STATUS_NON_CONVERGENT = 8,
  SL_STATUS_INSUFFICIENT_DATA = 9,
  SL_STATUS_SINGULAR = 10,
  SL_STATUS_IO = 11,
  SL_STATUS_PARSE = 12,
  SL_STATUS_PANIC = 13,
} SlStatus;

/*
 Opaque problem handle.
 */
typedef struct SlProblem SlProblem;

typedef struct SlComplex {
  double re;
  double im;
} SlComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Creates a problem on `[-S, S]` from `q_len` uniform potential samples (odd count,
 so that `x = 0` is a node) and the transfer matrix, normalized to unit determinant.
 `steps = 0` keeps the default integrator resolution.

 # Safety
 `q_samples` must point to `q_len` doubles; `out` must be writable.
 */
enum SlStatus sl_problem_new(double half_width,
                             const double *q_samples,
                             size_t q_len,
                             double m11,
                             double m12,
                             double m21,
                             double m22,
                             size_t steps,
                             struct SlProblem **out);

/*
 Creates a problem from the JSON text of a problem file; its angles are ignored.

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum SlStatus sl_problem_from_json(const char *json, struct SlProblem **out);

/*
 Releases a handle; null is ignored.

 # Safety
 `problem` must come from this library and not be used afterwards.
 */
void sl_problem_free(struct SlProblem *problem);

/*
 Characteristic function `Delta_{alpha,beta}(lambda)`.

 # Safety
 `problem` must be a live handle and `out` writable.
 */
enum SlStatus sl_delta(const struct SlProblem *problem,
                       double alpha,
                       double beta,
                       struct SlComplex lambda,
                       struct SlComplex *out);

/*
 Titchmarsh-Weyl function `m_{alpha,beta}(lambda)`; fails with `SL_STATUS_POLE` next to an eigenvalue.

 # Safety
 `problem` must be a live handle and `out` writable.
 */
enum SlStatus sl_m_function(const struct SlProblem *problem,
                            double alpha,
                            double beta,
                            struct SlComplex lambda,
                            struct SlComplex *out);

/*
 Writes the `count` smallest eigenvalues to `out`.

 # Safety
 `problem` must be a live handle; `out` must hold `count` doubles.
 */
enum SlStatus sl_eigenvalues(const struct SlProblem *problem,
                             double alpha,
                             double beta,
                             size_t count,
                             double *out);

/*
 Norming constant `a_n = int w_alpha^2` at the eigenvalue `lambda_n`.

 # Safety
 `problem` must be a live handle and `out` writable.
 */
enum SlStatus sl_norming_constant(const struct SlProblem *problem,
                                  double alpha,
                                  double beta,
                                  double lambda_n,
                                  double *out);

/*
 Scattering coefficients `A(xi)`, `B(xi)` for real `xi != 0`.

 # Safety
 `problem` must be a live handle; `a` and `b` writable.
 */
enum SlStatus sl_scattering_coefficients(const struct SlProblem *problem,
                                         double xi,
                                         struct SlComplex *a,
                                         struct SlComplex *b);

/*
 Copies the calling thread's last error message (NUL-terminated, truncated to fit)
 and returns the full message length excluding the terminator.

 # Safety
 `buf` must hold `len` bytes, or be null with `len = 0` to query the length.
 */
size_t sl_last_error_message(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SLTRANSFER_H */
