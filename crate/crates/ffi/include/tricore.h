#ifndef TRICORE_H
#define TRICORE_H

#include <stdint.h>
#include <stddef.h>

typedef enum TcStatus {
  TC_STATUS_OK = 0,
  TC_STATUS_NULL_POINTER = 1,
  TC_STATUS_INVALID_UTF8 = 2,
  /**
   * Input could not be parsed or has the wrong shape.
   */
  TC_STATUS_MALFORMED = 3,
  /**
   * Input was well formed but the computation rejected it.
   */
  TC_STATUS_DOMAIN = 4,
  /**
   * A value does not fit the requested C type, or an index is out of range.
   */
  TC_STATUS_OUT_OF_RANGE = 5,
  TC_STATUS_PANIC = 6,
} TcStatus;

/**
 * ℤ-coefficient chain complex.
 */
typedef struct TcComplex TcComplex;

/**
 * Integral homology of a complex.
 */
typedef struct TcHomology TcHomology;

/**
 * Integer matrix.
 */
typedef struct TcMatrix TcMatrix;

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *tc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tc_version(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void tc_string_free(char *s);

/**
 * Builds a `rows × cols` matrix from row-major entries.
 *
 * # Safety
 * `entries` must point to `rows * cols` readable values (it may be NULL
 * when that product is 0) and `out` must be writable.
 */
enum TcStatus tc_matrix_new(size_t rows,
                            size_t cols,
                            const int64_t *entries,
                            struct TcMatrix **out);

/**
 * Parses `{"rows": n, "cols": m, "entries": [[...]]}`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
enum TcStatus tc_matrix_from_json(const char *text, struct TcMatrix **out);

/**
 * # Safety
 * `m` must be a live handle or NULL.
 */
void tc_matrix_free(struct TcMatrix *m);

/**
 * # Safety
 * `m` must be a live handle; `rows` and `cols` writable.
 */
enum TcStatus tc_matrix_shape(const struct TcMatrix *m, size_t *rows, size_t *cols);

/**
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum TcStatus tc_matrix_get(const struct TcMatrix *m, size_t i, size_t j, int64_t *out);

/**
 * Canonical JSON for the matrix.
 *
 * # Safety
 * `m` must be a live handle and `out` writable.
 */
enum TcStatus tc_matrix_to_json(const struct TcMatrix *m, char **out);

/**
 * Smith normal form `U · M · V = D`. Any of `u`, `d`, `v` may be NULL when
 * that factor is not wanted; the others receive new handles.
 *
 * # Safety
 * `m` must be a live handle; non-NULL out-parameters must be writable.
 */
enum TcStatus tc_matrix_snf(const struct TcMatrix *m,
                            struct TcMatrix **u,
                            struct TcMatrix **d,
                            struct TcMatrix **v);

/**
 * Parses a complex in the `{"ring": "Z", "ranks": ..., "differentials": ...}`
 * format; ∂∘∂ = 0 is checked.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
enum TcStatus tc_complex_from_json(const char *text, struct TcComplex **out);

/**
 * # Safety
 * `c` must be a live handle or NULL.
 */
void tc_complex_free(struct TcComplex *c);

/**
 * # Safety
 * `c` must be a live handle and `out` writable.
 */
enum TcStatus tc_complex_homology(const struct TcComplex *c, struct TcHomology **out);

/**
 * # Safety
 * `h` must be a live handle or NULL.
 */
void tc_homology_free(struct TcHomology *h);

/**
 * Free rank of H_grade.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum TcStatus tc_homology_rank(const struct TcHomology *h, int64_t grade, size_t *out);

/**
 * Number of invariant factors of the torsion of H_grade.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum TcStatus tc_homology_torsion_len(const struct TcHomology *h, int64_t grade, size_t *out);

/**
 * The `k`-th invariant factor d_k (d_1 | d_2 | ...) of the torsion of H_grade.
 *
 * # Safety
 * `h` must be a live handle and `out` writable.
 */
enum TcStatus tc_homology_torsion(const struct TcHomology *h,
                                  int64_t grade,
                                  size_t k,
                                  int64_t *out);

/**
 * Runs a command-line subcommand in process. `argv` holds `argc` arguments
 * after the program name (e.g. `{"snf", "-"}`); `input` is fed as standard
 * input and may be NULL. The exit code is written to `exit_code` and the
 * standard output to `out`. The call itself only fails on bad pointers.
 *
 * # Safety
 * `argv` must hold `argc` NUL-terminated strings; `out` and `exit_code`
 * must be writable.
 */
enum TcStatus tc_run(const char *const *argv,
                     size_t argc,
                     const char *input,
                     char **out,
                     int32_t *exit_code);

#endif /* TRICORE_H */
