#ifndef BAIRE_H
#define BAIRE_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call. The domain values mirror the error kinds of the CLI.
 */
typedef enum BaireStatus {
  BAIRE_STATUS_OK = 0,
  BAIRE_STATUS_NULL_ARGUMENT = 1,
  BAIRE_STATUS_INVALID_UTF8 = 2,
  BAIRE_STATUS_INVALID_INPUT = 3,
  BAIRE_STATUS_NO_COVER = 4,
  BAIRE_STATUS_NOT_IN_A = 5,
  BAIRE_STATUS_CLASS_CAPTURED = 6,
  BAIRE_STATUS_BOUND_EXCEEDED = 7,
  BAIRE_STATUS_CANDIDATE_OVERFLOW = 8,
  BAIRE_STATUS_INCOMPARABLE_SIDE_CONDITIONS = 9,
  BAIRE_STATUS_DETERMINATION_FAILED = 10,
  BAIRE_STATUS_ENSURE_FAILED = 11,
  BAIRE_STATUS_TOO_LARGE = 12,
  BAIRE_STATUS_NOT_REACHABLE = 13,
  BAIRE_STATUS_PANIC = 14,
} BaireStatus;

/**
 * The chain set of a sequence.
 */
typedef struct BaireASet BaireASet;

/**
 * A challenge code.
 */
typedef struct BaireCode BaireCode;

/**
 * An eventually periodic sequence of naturals.
 */
typedef struct BaireSeq BaireSeq;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call on the same thread.
 */
const char *baire_last_error(void);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void baire_string_free(char *s);

/**
 * Version of the JSON documents this library reads and writes.
 */
uint32_t baire_json_version(void);

/**
 * Parses `{"prefix": [...], "period": [...]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum BaireStatus baire_seq_from_json(const char *json, struct BaireSeq **out);

/**
 * Writes entry `i` as a decimal string.
 *
 * # Safety
 * `seq` must be a live handle; `out` must be writable.
 */
enum BaireStatus baire_seq_at(const struct BaireSeq *seq, uint64_t i, char **out);

/**
 * # Safety
 * `seq` must come from `baire_seq_from_json` and not have been freed.
 */
void baire_seq_free(struct BaireSeq *seq);

/**
 * Parses a challenge code document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum BaireStatus baire_code_from_json(const char *json, struct BaireCode **out);

/**
 * Evaluates `code` at `x`, writing the value as a decimal string.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum BaireStatus baire_code_eval(const struct BaireCode *code,
                                 const struct BaireSeq *x,
                                 char **out);

/**
 * # Safety
 * `code` must come from `baire_code_from_json` and not have been freed.
 */
void baire_code_free(struct BaireCode *code);

/**
 * The chain set of `a`. The sequence is copied; `a` stays owned by the caller.
 *
 * # Safety
 * `a` must be a live handle; `out` must be writable.
 */
enum BaireStatus baire_aset_new(const struct BaireSeq *a, struct BaireASet **out);

/**
 * Chain element at `level` (level 0 is the root code 2).
 *
 * # Safety
 * `set` must be a live handle; `out` must be writable.
 */
enum BaireStatus baire_aset_element(const struct BaireASet *set, uint32_t level, char **out);

/**
 * Whether the decimal natural `value` is in the set.
 *
 * # Safety
 * `set` must be a live handle, `value` a NUL-terminated string and `out` writable.
 */
enum BaireStatus baire_aset_contains(const struct BaireASet *set, const char *value, bool *out);

/**
 * `f_a(x)(n)` for the set's sequence `a`, as a decimal string.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum BaireStatus baire_encode_f(const struct BaireASet *set,
                                const struct BaireSeq *x,
                                uint64_t n,
                                char **out);

/**
 * # Safety
 * `set` must come from `baire_aset_new` and not have been freed.
 */
void baire_aset_free(struct BaireASet *set);

/**
 * Recovers nodes of length `target_length` from a code dominating an exit
 * code, with the default search bounds. Writes
 * `{"candidates": [...], "thresholds": [...]}`.
 *
 * # Safety
 * `code_json` must be a NUL-terminated string; `out` must be writable.
 */
enum BaireStatus baire_decode_json(const char *code_json, uint32_t target_length, char **out);

/**
 * Runs the fusion for `n` coordinates with default bounds and writes the
 * certificate document.
 *
 * # Safety
 * Both strings must be NUL-terminated; `out` must be writable.
 */
enum BaireStatus baire_fuse_json(const char *a_json,
                                 const char *model_json,
                                 uint32_t n,
                                 char **out);

/**
 * Checks a certificate. `valid` receives the verdict and `report`, when not
 * null, the full report document.
 *
 * # Safety
 * `cert_json` must be NUL-terminated; `valid` must be writable; `report`
 * may be null.
 */
enum BaireStatus baire_check_cert_json(const char *cert_json, bool *valid, char **report);

/**
 * Evaluates coordinate `n` of a function family at `x`.
 *
 * # Safety
 * `family_json` must be NUL-terminated, `x` a live handle, `out` writable.
 */
enum BaireStatus baire_family_eval(const char *family_json,
                                   const struct BaireSeq *x,
                                   uint64_t n,
                                   char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* BAIRE_H */
