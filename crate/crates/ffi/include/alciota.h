#ifndef ALCIOTA_H
#define ALCIOTA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AlciotaBisimLogic {
  ALCIOTA_BISIM_LOGIC_ALC = 0,
  ALCIOTA_BISIM_LOGIC_ALCIL = 1,
  ALCIOTA_BISIM_LOGIC_ALCI = 2,
} AlciotaBisimLogic;

typedef enum AlciotaLogic {
  ALCIOTA_LOGIC_ALCIL = 0,
  ALCIOTA_LOGIC_ALCIG = 1,
  ALCIOTA_LOGIC_ALCI = 2,
} AlciotaLogic;

typedef enum AlciotaStatus {
  ALCIOTA_STATUS_OK = 0,
  ALCIOTA_STATUS_NULL_ARGUMENT = 1,
  ALCIOTA_STATUS_INVALID_UTF8 = 2,
  ALCIOTA_STATUS_PARSE = 3,
  ALCIOTA_STATUS_UNSUPPORTED = 4,
  ALCIOTA_STATUS_TIMEOUT = 5,
  ALCIOTA_STATUS_CAP_EXCEEDED = 6,
  ALCIOTA_STATUS_NO_MODEL = 7,
  ALCIOTA_STATUS_INVALID_ARGUMENT = 8,
  ALCIOTA_STATUS_INTERNAL = 9,
} AlciotaStatus;

/**
 * Values of `alciota_result_verdict`.
 */
typedef enum AlciotaVerdict {
  ALCIOTA_VERDICT_UNSAT = 0,
  ALCIOTA_VERDICT_SAT = 1,
} AlciotaVerdict;

typedef struct AlciotaConcept AlciotaConcept;

typedef struct AlciotaModel AlciotaModel;

typedef struct AlciotaOntology AlciotaOntology;

typedef struct AlciotaResult AlciotaResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *alciota_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void alciota_string_free(char *s);

/**
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum AlciotaStatus alciota_concept_parse(const char *text, struct AlciotaConcept **out);

/**
 * # Safety
 * `c` must be a live concept handle; `out` must be writable.
 */
enum AlciotaStatus alciota_concept_print(const struct AlciotaConcept *c, char **out);

/**
 * # Safety
 * `c` must be null or a concept handle not freed before.
 */
void alciota_concept_free(struct AlciotaConcept *c);

/**
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum AlciotaStatus alciota_ontology_parse(const char *text, struct AlciotaOntology **out);

/**
 * # Safety
 * `o` must be null or an ontology handle not freed before.
 */
void alciota_ontology_free(struct AlciotaOntology *o);

/**
 * Decides satisfiability of `c` with respect to `o` (which may be null).
 * `logic` is an `AlciotaLogic` value.
 * `timeout_ms` of 0 means no timeout.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum AlciotaStatus alciota_prove(const struct AlciotaConcept *c,
                                 const struct AlciotaOntology *o,
                                 uint32_t logic,
                                 bool enable_cut,
                                 uint64_t timeout_ms,
                                 struct AlciotaResult **out);

/**
 * # Safety
 * `r` must be a live result handle; `out` must be writable.
 */
enum AlciotaStatus alciota_result_verdict(const struct AlciotaResult *r, enum AlciotaVerdict *out);

/**
 * Copies the model of a satisfiable result.
 *
 * # Safety
 * `r` must be a live result handle; `out` must be writable.
 */
enum AlciotaStatus alciota_result_model(const struct AlciotaResult *r, struct AlciotaModel **out);

/**
 * Name of the model element that satisfies the input concept.
 *
 * # Safety
 * `r` must be a live result handle; `out` must be writable.
 */
enum AlciotaStatus alciota_result_root(const struct AlciotaResult *r, char **out);

/**
 * # Safety
 * `r` must be null or a result handle not freed before.
 */
void alciota_result_free(struct AlciotaResult *r);

/**
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum AlciotaStatus alciota_model_parse(const char *text, struct AlciotaModel **out);

/**
 * # Safety
 * `m` must be a live model handle; `out` must be writable.
 */
enum AlciotaStatus alciota_model_print(const struct AlciotaModel *m, char **out);

/**
 * Space-separated names of the elements of `m` in the extension of `c`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum AlciotaStatus alciota_model_eval(const struct AlciotaModel *m,
                                      const struct AlciotaConcept *c,
                                      char **out);

/**
 * Maximal bisimulation as lines "d e", or the empty string.
 * `logic` is an `AlciotaBisimLogic` value.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum AlciotaStatus alciota_bisim(const struct AlciotaModel *left,
                                 const struct AlciotaModel *right,
                                 uint32_t logic,
                                 char **out);

/**
 * # Safety
 * `m` must be null or a model handle not freed before.
 */
void alciota_model_free(struct AlciotaModel *m);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ALCIOTA_H */
