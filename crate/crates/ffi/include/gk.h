#ifndef GK_H
#define GK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GkStatus {
  GK_OK = 0,
  GK_NULL_POINTER = 1,
  GK_INVALID_ARGUMENT = 2,
  GK_RESOURCE_LIMIT = 3,
  GK_PARSE_ERROR = 4,
  GK_WRONG_FIELD = 5,
  GK_INTERNAL = 6,
} GkStatus;

/**
 * `K(d, s, m)`.
 */
typedef struct GkGraph GkGraph;

/**
 * A matrix over GF(p), the integers or the rationals.
 */
typedef struct GkMatrix GkMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call into this library on the same thread.
 */
const char *gk_last_error_message(void);

/**
 * Library version, a static string.
 */
const char *gk_version(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void gk_string_free(char *s);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum GkStatus gk_graph_new(uint32_t d, uint32_t s, uint32_t m, struct GkGraph **out);

/**
 * # Safety
 * `g` must come from [`gk_graph_new`] or be null.
 */
void gk_graph_free(struct GkGraph *g);

/**
 * # Safety
 * Pointers must be valid.
 */
enum GkStatus gk_graph_order(const struct GkGraph *g, uint64_t *out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum GkStatus gk_graph_adjacent(const struct GkGraph *g, uint64_t u, uint64_t v, bool *out);

/**
 * Subset of vertex `v` as a bit mask (bit `i` for element `i + 1`).
 *
 * # Safety
 * Pointers must be valid.
 */
enum GkStatus gk_graph_vertex_mask(const struct GkGraph *g, uint64_t v, uint64_t *out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum GkStatus gk_graph_to_json(const struct GkGraph *g, bool with_edges, char **out);

/**
 * Representing matrix of the graph modulo the prime `p`, under the default
 * memory guard.
 *
 * # Safety
 * Pointers must be valid.
 */
enum GkStatus gk_representing_matrix(const struct GkGraph *g, uint64_t p, struct GkMatrix **out);

/**
 * Parses the plain-text matrix format.
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` a valid pointer.
 */
enum GkStatus gk_matrix_from_text(const char *text, struct GkMatrix **out);

/**
 * # Safety
 * `m` must come from this library or be null.
 */
void gk_matrix_free(struct GkMatrix *m);

/**
 * # Safety
 * Pointers must be valid.
 */
enum GkStatus gk_matrix_to_text(const struct GkMatrix *m, char **out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum GkStatus gk_matrix_shape(const struct GkMatrix *m, uint64_t *rows, uint64_t *cols);

/**
 * Rank over the matrix's own field (over Q for integer matrices).
 *
 * # Safety
 * Pointers must be valid.
 */
enum GkStatus gk_matrix_rank(const struct GkMatrix *m, uint64_t *out);

/**
 * Hex SHA-256 of the canonical text form.
 *
 * # Safety
 * Pointers must be valid.
 */
enum GkStatus gk_matrix_digest(const struct GkMatrix *m, char **out);

/**
 * `M = B·B^T` over GF(2) with `rank(M)` columns in `B`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum GkStatus gk_lempel_factorize(const struct GkMatrix *m, struct GkMatrix **out_b);

/**
 * Odd-girth and rank certificate for `K(d, d/2, d/(2 ell))` as JSON.
 * The certificate's `verdict` field carries the outcome.
 *
 * # Safety
 * `out_json` must be a valid pointer.
 */
enum GkStatus gk_cert_cycles(uint32_t ell, uint32_t d, uint64_t p, char **out_json);

/**
 * # Safety
 * `out_json` must be a valid pointer.
 */
enum GkStatus gk_cert_triangle_free(uint32_t d, char **out_json);

/**
 * # Safety
 * `out_json` must be a valid pointer.
 */
enum GkStatus gk_cert_vchrom(uint32_t d, uint64_t p, char **out_json);

/**
 * `⌈k/s⌉·(d−2s) + 2k` as a decimal string.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GkStatus gk_stahl_rhs(uint64_t k, uint64_t s, uint64_t d, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GK_H */
