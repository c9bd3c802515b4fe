#ifndef ODTA_H
#define ODTA_H

/* Generated by cbindgen from crates/odta-ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define ODTA_OK 0

/**
 * A required pointer argument was NULL.
 */
#define ODTA_ERR_NULL 1

/**
 * A string argument was not UTF-8, or a result contained a NUL byte.
 */
#define ODTA_ERR_ENCODING 2

/**
 * The library panicked; the handle arguments should be discarded.
 */
#define ODTA_ERR_PANIC 3

/**
 * Verdicts, numbered like the command-line exit codes.
 */
#define ODTA_VERDICT_POSITIVE 0

#define ODTA_VERDICT_NEGATIVE 1

#define ODTA_VERDICT_UNKNOWN 2

#define ODTA_KIND_WEAK 0

#define ODTA_KIND_EXTENDED 1

#define ODTA_KIND_ODTA 2

/**
 * A parsed ODTA bundle (weak, extended weak or full).
 */
typedef struct OdtaBundle OdtaBundle;

/**
 * A parsed ordered-data tree with natural-number values.
 */
typedef struct OdtaTree OdtaTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL if there was none.
 * The caller frees the result with [`odta_string_free`].
 */
char *odta_last_error(void);

/**
 * # Safety
 * `s` is NULL or a string returned by this library and not yet freed.
 */
void odta_string_free(char *s);

/**
 * Parses a bundle file into `*out`.
 *
 * # Safety
 * `src` is a NUL-terminated string; `out` is valid for writes.
 */
int32_t odta_bundle_parse(const char *src, struct OdtaBundle **out);

/**
 * # Safety
 * `b` is NULL or a handle from [`odta_bundle_parse`] not yet freed.
 */
void odta_bundle_free(struct OdtaBundle *b);

/**
 * One of the `ODTA_KIND_*` constants, or -1 for a NULL handle.
 *
 * # Safety
 * `b` is NULL or a live bundle handle.
 */
int32_t odta_bundle_kind(const struct OdtaBundle *b);

/**
 * Canonical text of the bundle.
 *
 * # Safety
 * `b` is a live bundle handle; `out` is valid for writes.
 */
int32_t odta_bundle_write(const struct OdtaBundle *b, char **out);

/**
 * Parses a tree such as `(a@2 (b@1))`; the alphabet is taken in order of
 * first appearance.
 *
 * # Safety
 * `src` is a NUL-terminated string; `out` is valid for writes.
 */
int32_t odta_tree_parse(const char *src, struct OdtaTree **out);

/**
 * # Safety
 * `t` is NULL or a handle from [`odta_tree_parse`] not yet freed.
 */
void odta_tree_free(struct OdtaTree *t);

/**
 * Number of nodes, or 0 for a NULL handle.
 *
 * # Safety
 * `t` is NULL or a live tree handle.
 */
uintptr_t odta_tree_len(const struct OdtaTree *t);

/**
 * # Safety
 * `t` is a live tree handle; `out` is valid for writes.
 */
int32_t odta_tree_write(const struct OdtaTree *t, char **out);

/**
 * String representation of the tree, e.g. `{b,c} {a,b,c} {a,b}`.
 *
 * # Safety
 * `t` is a live tree handle; `out` is valid for writes.
 */
int32_t odta_tree_string_representation(const struct OdtaTree *t, char **out);

/**
 * Membership of `t` in `b`. The tree's labels are matched to the bundle's
 * input alphabet by name. `budget` bounds the node assignments tried, and
 * `solver_budget` the LP relaxations of extended bundles; 0 selects the
 * defaults.
 *
 * # Safety
 * `b` and `t` are live handles; `verdict` is valid for writes.
 */
int32_t odta_member(const struct OdtaBundle *b,
                    const struct OdtaTree *t,
                    uint64_t budget,
                    uint64_t solver_budget,
                    int32_t *verdict);

/**
 * Emptiness of `b` under default caps, with the solver budget overridden
 * when `solver_budget` is nonzero. On a positive verdict `*witness`
 * receives the witness tree; otherwise it is set to NULL. `witness` may
 * itself be NULL.
 *
 * # Safety
 * `b` is a live handle; `verdict` is valid for writes; `witness` is NULL
 * or valid for writes.
 */
int32_t odta_empty(const struct OdtaBundle *b,
                   uint64_t solver_budget,
                   int32_t *verdict,
                   char **witness);

/**
 * Satisfiability of a DTD under a constraints file, both given as text.
 * `*witness` is set as in [`odta_empty`].
 *
 * # Safety
 * `dtd` and `constraints` are NUL-terminated strings; `verdict` is valid
 * for writes; `witness` is NULL or valid for writes.
 */
int32_t odta_dtd_sat(const char *dtd, const char *constraints, int32_t *verdict, char **witness);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ODTA_H */
