#ifndef MWELEX_H
#define MWELEX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MwelexStatus {
  MWELEX_STATUS_OK = 0,
  MWELEX_STATUS_NULL_POINTER = 1,
  MWELEX_STATUS_INVALID_UTF8 = 2,
  MWELEX_STATUS_PARSE_ERROR = 3,
  MWELEX_STATUS_INVALID_ARGUMENT = 4,
  /**
   * The statistic exists only as a reason, e.g. zero variance.
   */
  MWELEX_STATUS_UNDEFINED = 5,
  MWELEX_STATUS_PANIC = 6,
} MwelexStatus;

typedef struct MwelexRegistry MwelexRegistry;

typedef struct MwelexTable MwelexTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library on this thread.
 */
const char *mwelex_last_error_message(void);

/**
 * Library version, static storage.
 */
const char *mwelex_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void mwelex_string_free(char *s);

struct MwelexRegistry *mwelex_registry_standard(void);

/**
 * # Safety
 * `reg` must be null or a handle from `mwelex_registry_standard`, freed once.
 */
void mwelex_registry_free(struct MwelexRegistry *reg);

/**
 * Parses a TSV table. On success `*out` receives a handle to free with
 * `mwelex_table_free`.
 *
 * # Safety
 * Pointers must be valid; `source` must be NUL-terminated.
 */
enum MwelexStatus mwelex_table_parse(const struct MwelexRegistry *reg,
                                     const char *source,
                                     struct MwelexTable **out);

/**
 * # Safety
 * `t` must be null or a handle from `mwelex_table_parse`, freed once.
 */
void mwelex_table_free(struct MwelexTable *t);

/**
 * Number of entries, 0 for a null handle.
 *
 * # Safety
 * `t` must be null or a live table handle.
 */
size_t mwelex_table_entry_count(const struct MwelexTable *t);

/**
 * Canonical TSV text of the table.
 *
 * # Safety
 * `t` must be a live table handle and `out` writable.
 */
enum MwelexStatus mwelex_table_serialize(const struct MwelexTable *t, char **out);

/**
 * Violations as a JSON array.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum MwelexStatus mwelex_table_validate_json(const struct MwelexTable *t,
                                             const struct MwelexRegistry *reg,
                                             bool has_copula,
                                             char **out);

/**
 * Per-entry outcomes of both trees and their cross-check, as a JSON array.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum MwelexStatus mwelex_table_classify_json(const struct MwelexTable *t,
                                             const struct MwelexRegistry *reg,
                                             bool has_copula,
                                             char **out);

/**
 * Pearson's r between two binary features over pairwise-complete rows.
 * Returns `MWELEX_STATUS_UNDEFINED` when r does not exist; `*n_complete`
 * is written in both cases.
 *
 * # Safety
 * Handles and strings must be valid; output pointers writable or null.
 */
enum MwelexStatus mwelex_pearson(const struct MwelexTable *t,
                                 const struct MwelexRegistry *reg,
                                 const char *feature_f,
                                 const char *feature_g,
                                 double *r,
                                 size_t *n_complete);

/**
 * Cohen's kappa between two judges' columns, given as whitespace-separated
 * cells (`+ - ? ...`) in the same entry order.
 *
 * # Safety
 * Strings must be valid; `kappa` writable or null.
 */
enum MwelexStatus mwelex_kappa(const char *judge_a, const char *judge_b, double *kappa);

/**
 * Matches the table's variants against a corpus of one sentence per line
 * (`surface/lemma` tokens or bare words). Spans come back as a JSON array.
 *
 * # Safety
 * Handles and strings must be valid; `out` writable.
 */
enum MwelexStatus mwelex_match_json(const struct MwelexTable *t,
                                    const char *corpus,
                                    size_t max_slot_len,
                                    size_t max_gap,
                                    char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MWELEX_H */
