#ifndef ORDLOG_H
#define ORDLOG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OrdlogStatus {
  ORDLOG_STATUS_OK = 0,
  ORDLOG_STATUS_NULL_ARGUMENT = 1,
  ORDLOG_STATUS_INVALID_UTF8 = 2,
  ORDLOG_STATUS_SYNTAX_ERROR = 3,
  ORDLOG_STATUS_INVALID_STRUCTURE = 4,
  ORDLOG_STATUS_UNKNOWN_TOKEN = 5,
  ORDLOG_STATUS_PARSE_FAILED = 6,
  ORDLOG_STATUS_PANIC = 7,
} OrdlogStatus;

typedef struct OrdlogGrammar OrdlogGrammar;

typedef struct OrdlogParseResult OrdlogParseResult;

typedef struct OrdlogStructure OrdlogStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *ordlog_last_error_message(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library.
 */
void ordlog_string_free(char *s);

/**
 * Loads a grammar from its source text.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a valid pointer.
 */
enum OrdlogStatus ordlog_grammar_load(const char *source, struct OrdlogGrammar **out);

/**
 * The built-in German demo grammar.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum OrdlogStatus ordlog_grammar_demo(struct OrdlogGrammar **out);

/**
 * # Safety
 * `g` must be NULL or a grammar from this library, not yet freed.
 */
void ordlog_grammar_free(struct OrdlogGrammar *g);

/**
 * Reads a structure file's text.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a valid pointer.
 */
enum OrdlogStatus ordlog_structure_read(const char *source, struct OrdlogStructure **out);

/**
 * # Safety
 * `s` must be NULL or a structure from `ordlog_structure_read`, not yet
 * freed. Structures borrowed from a parse result must not be passed here.
 */
void ordlog_structure_free(struct OrdlogStructure *s);

/**
 * Writes a structure in the structure file format.
 *
 * # Safety
 * `s` must be a live structure and `out` a valid pointer.
 */
enum OrdlogStatus ordlog_structure_write(const struct OrdlogStructure *s, char **out);

/**
 * Counts well-formedness violations; the message lists them.
 *
 * # Safety
 * `s` must be a live structure and `count` a valid pointer.
 */
enum OrdlogStatus ordlog_structure_validate(const struct OrdlogStructure *s, size_t *count);

/**
 * Renders a valid structure as a Graphviz digraph.
 *
 * # Safety
 * `s` must be a live structure and `out` a valid pointer.
 */
enum OrdlogStatus ordlog_structure_to_dot(const struct OrdlogStructure *s,
                                          bool all_domains,
                                          char **out);

/**
 * Parses a whitespace-separated sentence. `max_structures` and
 * `timeout_ms` of 0 mean unlimited.
 *
 * # Safety
 * `g` must be a live grammar, `sentence` a NUL-terminated string and `out`
 * a valid pointer.
 */
enum OrdlogStatus ordlog_parse(const struct OrdlogGrammar *g,
                               const char *sentence,
                               size_t max_structures,
                               uint64_t timeout_ms,
                               struct OrdlogParseResult **out);

/**
 * # Safety
 * `r` must be a live parse result.
 */
size_t ordlog_result_count(const struct OrdlogParseResult *r);

/**
 * False if a limit cut the search short.
 *
 * # Safety
 * `r` must be a live parse result.
 */
bool ordlog_result_exhausted(const struct OrdlogParseResult *r);

/**
 * The `i`-th structure, borrowed from the result; NULL if out of range.
 *
 * # Safety
 * `r` must be a live parse result.
 */
const struct OrdlogStructure *ordlog_result_structure(const struct OrdlogParseResult *r, size_t i);

/**
 * # Safety
 * `r` must be NULL or a parse result from this library, not yet freed.
 */
void ordlog_result_free(struct OrdlogParseResult *r);

/**
 * Whether the sentence has at least one structure.
 *
 * # Safety
 * `g` must be a live grammar, `sentence` a NUL-terminated string and `out`
 * a valid pointer.
 */
enum OrdlogStatus ordlog_recognize(const struct OrdlogGrammar *g,
                                   const char *sentence,
                                   uint64_t timeout_ms,
                                   bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORDLOG_H */
