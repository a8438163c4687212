#ifndef CKN_EIGEN_H
#define CKN_EIGEN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>

/*
 Status codes; the first four match the CLI exit codes.
 */
typedef enum CknStatus {
  CKN_STATUS_OK = 0,
  CKN_STATUS_CONFIG = 1,
  CKN_STATUS_NUMERICAL = 2,
  CKN_STATUS_IO = 3,
  CKN_STATUS_NULL_POINTER = 4,
  CKN_STATUS_PANIC = 5,
  CKN_STATUS_BUFFER_TOO_SMALL = 6,
} CknStatus;

/*
 Eigenpairs computed by [`ckn_solver_solve`].
 */
typedef struct CknSequence CknSequence;

/*
 An assembled problem.
 */
typedef struct CknSolver CknSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *ckn_version(void);

/*
 Message of the last failed call on this thread ("" after a success).
 The pointer stays valid until the next library call on the same thread.
 */
const char *ckn_last_error_message(void);

/*
 Assembles a builtin preset.

 # Safety
 `name` must be a NUL-terminated string; `solver` must be writable.
 */
enum CknStatus ckn_solver_new_from_preset(const char *name, struct CknSolver **solver);

/*
 Assembles a problem from TOML configuration text. Relative paths in the
 text resolve against the working directory.

 # Safety
 `config` must be a NUL-terminated string; `solver` must be writable.
 */
enum CknStatus ckn_solver_new_from_config(const char *config, struct CknSolver **solver);

/*
 # Safety
 `solver` must come from a `ckn_solver_new_*` call and not be freed twice. Null is ignored.
 */
void ckn_solver_free(struct CknSolver *solver);

/*
 Number of unknowns of the assembled pencil.

 # Safety
 Pointers must be valid or null.
 */
enum CknStatus ckn_solver_order(const struct CknSolver *solver, size_t *order);

/*
 Computes the first `count` positive eigenpairs (`count = 0` uses the configured count).
 A partial result is not an error; see [`ckn_sequence_is_partial`].

 # Safety
 Pointers must be valid or null.
 */
enum CknStatus ckn_solver_solve(const struct CknSolver *solver,
                                size_t count,
                                struct CknSequence **sequence);

/*
 # Safety
 `sequence` must come from [`ckn_solver_solve`] and not be freed twice. Null is ignored.
 */
void ckn_sequence_free(struct CknSequence *sequence);

/*
 Number of eigenpairs found.

 # Safety
 Pointers must be valid or null.
 */
enum CknStatus ckn_sequence_len(const struct CknSequence *sequence, size_t *len);

/*
 Whether fewer eigenpairs than requested were found.

 # Safety
 Pointers must be valid or null.
 */
enum CknStatus ckn_sequence_is_partial(const struct CknSequence *sequence, bool *partial);

/*
 Copies the eigenvalues (ascending) into `buffer`.

 # Safety
 `buffer` must hold `capacity` doubles.
 */
enum CknStatus ckn_sequence_eigenvalues(const struct CknSequence *sequence,
                                        double *buffer,
                                        size_t capacity);

/*
 Copies eigenvector `index` (0-based, B-normalized nodal values) into `buffer`.

 # Safety
 `buffer` must hold `capacity` doubles.
 */
enum CknStatus ckn_sequence_eigenvector(const struct CknSequence *sequence,
                                        size_t index,
                                        double *buffer,
                                        size_t capacity);

/*
 Relative residual `||A e - lambda B e|| / ||A e||` of pair `index`.

 # Safety
 Pointers must be valid or null.
 */
enum CknStatus ckn_sequence_residual(const struct CknSequence *sequence,
                                     size_t index,
                                     double *residual);

/*
 `2N / (N - 2 + alpha)`.

 # Safety
 `value` must be writable.
 */
enum CknStatus ckn_critical_exponent(size_t dimension, double alpha, double *value);

/*
 `(2 / (N - 2 + alpha))^2`.

 # Safety
 `value` must be writable.
 */
enum CknStatus ckn_hardy_constant(size_t dimension, double alpha, double *value);

/*
 Shooting-oracle eigenvalue `n` (1-based) for a radial solver.

 # Safety
 Pointers must be valid or null.
 */
enum CknStatus ckn_oracle_eigen(const struct CknSolver *solver,
                                size_t n,
                                double *lambda,
                                bool *certified);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CKN_EIGEN_H */
