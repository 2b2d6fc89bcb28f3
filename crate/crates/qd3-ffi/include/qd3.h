/* C interface to the qd3 numerical workbench. */

#ifndef QD3_H
#define QD3_H

/* Generated by cbindgen from crates/qd3-ffi; do not edit. */

#include <stddef.h>
#include <stdint.h>

// Result of a C-ABI call.
typedef enum Qd3Status {
  // Success.
  QD3_STATUS_OK = 0,
  // A required pointer argument was null.
  QD3_STATUS_NULL_POINTER = 1,
  // An argument is out of range or not valid UTF-8.
  QD3_STATUS_INVALID_ARGUMENT = 2,
  // Parameters failed validation.
  QD3_STATUS_INVALID_PARAMS = 3,
  // Malformed configuration or unsupported request.
  QD3_STATUS_CONFIG = 4,
  // Bethe root counts violate the counting rule.
  QD3_STATUS_COUNTING_RULE = 5,
  // Evaluation too close to a pole or singular point.
  QD3_STATUS_NEAR_POLE = 6,
  // A numerical routine failed (singular matrix, no convergence, …).
  QD3_STATUS_NUMERICAL = 7,
  // The output buffer is too small; `*out_len` holds the required size.
  QD3_STATUS_BUFFER_TOO_SMALL = 8,
  // An internal panic was caught at the boundary.
  QD3_STATUS_PANIC = 9,
} Qd3Status;

// Local matrices available through [`qd3_local_operator`].
typedef enum Qd3LocalOperator {
  // Vector R-matrix, 36 × 36.
  QD3_LOCAL_OPERATOR_R_VECTOR = 0,
  // Fused R⁺ on the spinor ⊗ vector space, 24 × 24.
  QD3_LOCAL_OPERATOR_R_PLUS = 1,
  // Fused R⁻ on the spinor ⊗ vector space, 24 × 24.
  QD3_LOCAL_OPERATOR_R_MINUS = 2,
  // Spinorial R-matrix, 16 × 16.
  QD3_LOCAL_OPERATOR_R_SPINORIAL = 3,
  // Boundary K-matrix, 6 × 6.
  QD3_LOCAL_OPERATOR_K_MINUS = 4,
  // Dual boundary K-matrix, 6 × 6.
  QD3_LOCAL_OPERATOR_K_BAR = 5,
  // Fused boundary K-matrix of the (+) family, 4 × 4.
  QD3_LOCAL_OPERATOR_K_PLUS_FUSED = 6,
  // Fused boundary K-matrix of the (−) family, 4 × 4.
  QD3_LOCAL_OPERATOR_K_MINUS_FUSED = 7,
} Qd3LocalOperator;

// Sign of a fused transfer matrix.
typedef enum Qd3Sign {
  // t₊.
  QD3_SIGN_PLUS = 0,
  // t₋.
  QD3_SIGN_MINUS = 1,
} Qd3Sign;

// Scope of the identity catalog.
typedef enum Qd3Scope {
  // Local R/K identities.
  QD3_SCOPE_LOCAL = 0,
  // Degenerations and fusion identities.
  QD3_SCOPE_FUSION = 1,
  // Transfer-matrix identities.
  QD3_SCOPE_TRANSFER = 2,
  // All of the above.
  QD3_SCOPE_ALL = 3,
} Qd3Scope;

// Opaque chain builder (monodromies and transfer matrices).
typedef struct Qd3Chain Qd3Chain;

// Opaque validated model parameters.
typedef struct Qd3Params Qd3Params;

// Opaque command report.
typedef struct Qd3Report Qd3Report;

// Complex number with the C layout `{ double re; double im; }`.
typedef struct Qd3Complex {
  // Real part.
  double re;
  // Imaginary part.
  double im;
} Qd3Complex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `capacity`). Returns the full message length excluding the
// terminator, so a caller can size the buffer with a first call passing
// `capacity = 0`.
//
// # Safety
// `buf` must be valid for `capacity` bytes (or null when `capacity` is 0).
size_t qd3_last_error_message(char *buf, size_t capacity);

// Library version as a static NUL-terminated string.
const char *qd3_version(void);

// c₃ = c(c + e^{−c₂})/c₁, the boundary parameter fixed by the other three.
//
// # Safety
// `out` must be null or writable.
enum Qd3Status qd3_derive_c3(struct Qd3Complex c,
                             struct Qd3Complex c1,
                             struct Qd3Complex c2,
                             struct Qd3Complex *out);

// Validated default parameter profile on `n_sites` sites.
//
// # Safety
// `out` must be null or writable.
enum Qd3Status qd3_params_default(size_t n_sites, struct Qd3Params **out);

// Parses and validates a JSON configuration document.
//
// # Safety
// `json` must be null or a NUL-terminated string; `out` must be null or
// writable.
enum Qd3Status qd3_params_from_json(const char *json, struct Qd3Params **out);

// Replaces the random seed of a parameter handle.
//
// # Safety
// `params` must be null or a live handle.
enum Qd3Status qd3_params_set_seed(struct Qd3Params *params, uint64_t seed);

// Number of sites (0 for a null handle).
//
// # Safety
// `params` must be null or a live handle.
size_t qd3_params_n_sites(const struct Qd3Params *params);

// Releases a parameter handle.
//
// # Safety
// `params` must be null or a handle not yet released.
void qd3_params_free(struct Qd3Params *params);

// Evaluates the local matrix selected by `which` (a [`Qd3LocalOperator`])
// at spectral parameter `u` into `out` (row-major, size-query convention).
//
// # Safety
// `params` must be null or live; `out`/`out_len` as for every buffer call.
enum Qd3Status qd3_local_operator(const struct Qd3Params *params,
                                  int32_t which,
                                  struct Qd3Complex u,
                                  struct Qd3Complex *out,
                                  size_t capacity,
                                  size_t *out_len);

// Builds a chain for the given parameters.
//
// # Safety
// `params` must be null or live; `out` must be null or writable.
enum Qd3Status qd3_chain_new(const struct Qd3Params *params, struct Qd3Chain **out);

// Dimension 6^N of the physical space (0 for a null handle).
//
// # Safety
// `chain` must be null or a live handle.
size_t qd3_chain_dim(const struct Qd3Chain *chain);

// Transfer matrix t(u) into `out` (row-major, size-query convention).
//
// # Safety
// `chain` must be null or live; `out`/`out_len` as for every buffer call.
enum Qd3Status qd3_chain_transfer(const struct Qd3Chain *chain,
                                  struct Qd3Complex u,
                                  struct Qd3Complex *out,
                                  size_t capacity,
                                  size_t *out_len);

// Fused transfer matrix t₊(u) or t₋(u), selected by `sign` (a [`Qd3Sign`]),
// into `out`.
//
// # Safety
// `chain` must be null or live; `out`/`out_len` as for every buffer call.
enum Qd3Status qd3_chain_transfer_fused(const struct Qd3Chain *chain,
                                        struct Qd3Complex u,
                                        int32_t sign,
                                        struct Qd3Complex *out,
                                        size_t capacity,
                                        size_t *out_len);

// Releases a chain handle.
//
// # Safety
// `chain` must be null or a handle not yet released.
void qd3_chain_free(struct Qd3Chain *chain);

// Runs the identity catalog for `scope` (a [`Qd3Scope`]) with `n_samples`
// points per sampled identity.
//
// # Safety
// `params` must be null or live; `out` must be null or writable.
enum Qd3Status qd3_verify(const struct Qd3Params *params,
                          int32_t scope,
                          size_t n_samples,
                          struct Qd3Report **out);

// Diagonalizes the transfer family (N ≤ 3) on `grid_points` generic points
// and checks the eigenvalue relations; `u_max` bounds the asymptotic probes.
//
// # Safety
// `params` must be null or live; `out` must be null or writable.
enum Qd3Status qd3_spectrum(const struct Qd3Params *params,
                            size_t grid_points,
                            double u_max,
                            struct Qd3Report **out);

// Solves the Bethe equations with root counts (l1, l2, l3) from `n_starts`
// random starts and matches the states to the spectrum.
//
// # Safety
// `params` must be null or live; `out` must be null or writable.
enum Qd3Status qd3_bae(const struct Qd3Params *params,
                       size_t l1,
                       size_t l2,
                       size_t l3,
                       size_t n_starts,
                       size_t grid_points,
                       double u_max,
                       struct Qd3Report **out);

// 1 if every check in the report passed, 0 otherwise (or for null).
//
// # Safety
// `report` must be null or a live handle.
int32_t qd3_report_passed(const struct Qd3Report *report);

// Number of residual records in the report (0 for null).
//
// # Safety
// `report` must be null or a live handle.
size_t qd3_report_record_count(const struct Qd3Report *report);

// JSON text of the report; owned by the handle and valid until it is
// released. Null for a null handle.
//
// # Safety
// `report` must be null or a live handle.
const char *qd3_report_json(const struct Qd3Report *report);

// Releases a report handle.
//
// # Safety
// `report` must be null or a handle not yet released.
void qd3_report_free(struct Qd3Report *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QD3_H */
