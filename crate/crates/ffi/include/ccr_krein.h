#ifndef CCR_KREIN_H
#define CCR_KREIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CcrStatus {
  CCR_STATUS_OK = 0,
  CCR_STATUS_NULL_POINTER = 1,
  CCR_STATUS_INVALID_INPUT = 2,
  CCR_STATUS_PARSE_ERROR = 3,
  CCR_STATUS_DOMAIN_ERROR = 4,
  CCR_STATUS_NULL_SUBREPRESENTATION = 5,
  CCR_STATUS_NOT_UNIMODULAR = 6,
  CCR_STATUS_NOT_REGULARIZABLE = 7,
  CCR_STATUS_NOT_HERMITIAN = 8,
  CCR_STATUS_DEGENERATE = 9,
  CCR_STATUS_ZERO_VECTOR = 10,
  CCR_STATUS_ZERO_INPUT = 11,
  CCR_STATUS_ALIASING_RISK = 12,
  CCR_STATUS_INCOMPATIBLE_ALGEBRAS = 13,
  CCR_STATUS_INVALID_INVOLUTION = 14,
  CCR_STATUS_SINGULAR_TRANSFORMATION = 15,
  CCR_STATUS_BUFFER_TOO_SMALL = 16,
  CCR_STATUS_PANIC = 17,
} CcrStatus;

typedef enum CcrOrbit {
  CCR_ORBIT_SIGMA_PLUS = 0,
  CCR_ORBIT_SIGMA_THREE = 1,
  CCR_ORBIT_SIGMA_ONE = 2,
  CCR_ORBIT_SIGMA_MINUS = 3,
} CcrOrbit;

/**
 * Opaque multimode representation.
 */
typedef struct CcrMultimode CcrMultimode;

/**
 * Opaque single-mode representation.
 */
typedef struct CcrRep CcrRep;

typedef struct CcrRepReport {
  double star_property_max_residual;
  double star_property_max_relative;
  double ccr_max_residual;
  double gram_recursion_max_relative;
  bool gauge_covariance_exact;
  double gauge_isometry_max_residual;
} CcrRepReport;

typedef struct CcrCanonical {
  /**
   * `+1` or `-1`.
   */
  int32_t sign;
  bool schroedinger;
  /**
   * Reduced θ (Schroedinger type only).
   */
  double theta;
  double gamma;
  double gauge_phase;
  int64_t level_shift;
} CcrCanonical;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message (NUL-terminated) into `buf`. Returns the
 * length without the terminator, or 0 when there is no error.
 *
 * # Safety
 * `buf` must be valid for `len` bytes or null.
 */
size_t ccr_last_error_message(char *buf, size_t len);

/**
 * Fock representation on levels `0..=levels`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CcrStatus ccr_rep_fock(size_t levels, struct CcrRep **out);

/**
 * Anti-Fock representation; `schroedinger_flavor` selects the label.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CcrStatus ccr_rep_antifock(size_t levels, bool schroedinger_flavor, struct CcrRep **out);

/**
 * Schroedinger-type representation; `sign` is `+1` or `-1`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CcrStatus ccr_rep_schroedinger(double theta,
                                    double gamma,
                                    size_t levels,
                                    int32_t sign,
                                    struct CcrRep **out);

/**
 * # Safety
 * `rep` must come from a `ccr_rep_*` constructor and not be used afterwards.
 */
void ccr_rep_free(struct CcrRep *rep);

/**
 * # Safety
 * `rep` must be a live handle.
 */
size_t ccr_rep_dim(const struct CcrRep *rep);

/**
 * Writes the real parts of the Gram diagonal (one value per level).
 *
 * # Safety
 * `rep` must be live; `out` valid for `len` doubles.
 */
enum CcrStatus ccr_rep_gram(const struct CcrRep *rep, double *out, size_t len);

/**
 * Runs the representation checks with `samples` gauge parameters.
 *
 * # Safety
 * `rep` must be live; `out` valid.
 */
enum CcrStatus ccr_rep_verify(const struct CcrRep *rep, size_t samples, struct CcrRepReport *out);

/**
 * Normal-orders an expression. The result is freed with
 * [`ccr_string_free`].
 *
 * # Safety
 * `expr` must be a NUL-terminated string; `out` valid.
 */
enum CcrStatus ccr_normal_order(const char *expr, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void ccr_string_free(char *s);

/**
 * Classifies a real `(n3, n-, n+)`.
 *
 * # Safety
 * `out` must be valid.
 */
enum CcrStatus ccr_classify_orbit(double n3, double nminus, double nplus, enum CcrOrbit *out);

/**
 * `D_λ(x)` for complex `x`; writes value and derivative.
 *
 * # Safety
 * Output pointers must be valid.
 */
enum CcrStatus ccr_weber_d(double lambda,
                           double x_re,
                           double x_im,
                           double *value_re,
                           double *value_im,
                           double *deriv_re,
                           double *deriv_im);

/**
 * Reduces `V` (row-major, interleaved re/im, 8 doubles) with constant `μ`.
 *
 * # Safety
 * `v` must hold 8 doubles; `out` valid.
 */
enum CcrStatus ccr_reduce_canonical(const double *v,
                                    double mu_re,
                                    double mu_im,
                                    struct CcrCanonical *out);

/**
 * Multimode representation with signs `eta[0..modes]` (each ±1) and
 * total-degree cap `degree`.
 *
 * # Safety
 * `eta` valid for `modes` bytes; `out` valid.
 */
enum CcrStatus ccr_multimode_build(const int8_t *eta,
                                   size_t modes,
                                   uint32_t degree,
                                   struct CcrMultimode **out);

/**
 * # Safety
 * `rep` must come from [`ccr_multimode_build`] and not be used afterwards.
 */
void ccr_multimode_free(struct CcrMultimode *rep);

/**
 * # Safety
 * `rep` must be live.
 */
size_t ccr_multimode_dim(const struct CcrMultimode *rep);

/**
 * Exact CCR defect and *-property flag of a multimode representation.
 *
 * # Safety
 * `rep` must be live; outputs valid.
 */
enum CcrStatus ccr_multimode_check(const struct CcrMultimode *rep,
                                   int64_t *ccr_defect,
                                   bool *star_exact);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CCR_KREIN_H */
