#ifndef BESG_H
#define BESG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BesgStatus {
  // Success, or an affirmative answer.
  BESG_STATUS_OK = 0,
  // A well-formed negative answer.
  BESG_STATUS_FALSE = 1,
  // A null pointer or a string that is not UTF-8.
  BESG_STATUS_INVALID_ARGUMENT = 2,
  // A document that does not parse or does not fit its schema.
  BESG_STATUS_PARSE = 3,
  // Input that parses but is rejected by the library.
  BESG_STATUS_INVALID = 4,
  // A search gave up at its budget.
  BESG_STATUS_BUDGET = 5,
  // A bug: the library panicked.
  BESG_STATUS_INTERNAL = 6,
} BesgStatus;

// Opaque grammar handle: a grammar together with its decoding system.
typedef struct BesgGrammar BesgGrammar;

// Opaque string graph handle.
typedef struct BesgGraph BesgGraph;

// Opaque rewrite rule handle.
typedef struct BesgRule BesgRule;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread, or null. Valid until the
// next failing call on the same thread.
const char *besg_last_error(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void besg_string_free(char *s);

// # Safety
// `json` must be a NUL-terminated string; `out_graph` must be writable.
enum BesgStatus besg_graph_from_json(const char *json, struct BesgGraph **out_graph);

// # Safety
// `graph` must be a live handle; `out_json` must be writable.
enum BesgStatus besg_graph_to_json(const struct BesgGraph *graph, char **out_json);

// # Safety
// `graph` must be null or a handle from this library, not yet freed.
void besg_graph_free(struct BesgGraph *graph);

// `Ok` if the graph is a string graph, `False` otherwise.
//
// # Safety
// `graph` must be a live handle.
enum BesgStatus besg_graph_is_string_graph(const struct BesgGraph *graph);

// # Safety
// `graph` must be a live handle; `out_graph` must be writable.
enum BesgStatus besg_graph_minimal_representative(const struct BesgGraph *graph,
                                                  struct BesgGraph **out_graph);

// # Safety
// `a` and `b` must be live handles.
enum BesgStatus besg_graph_homeomorphic(const struct BesgGraph *a, const struct BesgGraph *b);

// # Safety
// `a` and `b` must be live handles.
enum BesgStatus besg_graph_isomorphic(const struct BesgGraph *a, const struct BesgGraph *b);

// # Safety
// `json` must be a NUL-terminated string; `out_rule` must be writable.
enum BesgStatus besg_rule_from_json(const char *json, struct BesgRule **out_rule);

// # Safety
// `rule` must be null or a handle from this library, not yet freed.
void besg_rule_free(struct BesgRule *rule);

// Number of matching classes of `pattern` into `target`.
//
// # Safety
// `pattern` and `target` must be live handles; `out_count` must be writable.
enum BesgStatus besg_match_count(const struct BesgGraph *pattern,
                                 const struct BesgGraph *target,
                                 size_t *out_count);

// Rewrites `target` at the matching class numbered `index`.
//
// # Safety
// `rule` and `target` must be live handles; `out_graph` must be writable.
enum BesgStatus besg_rule_apply(const struct BesgRule *rule,
                                const struct BesgGraph *target,
                                size_t index,
                                struct BesgGraph **out_graph);

// Parses a grammar document and checks every grammar condition.
//
// # Safety
// `json` must be a NUL-terminated string; `out_grammar` must be writable.
enum BesgStatus besg_grammar_from_json(const char *json, struct BesgGrammar **out_grammar);

// # Safety
// `grammar` must be null or a handle from this library, not yet freed.
void besg_grammar_free(struct BesgGrammar *grammar);

// `Ok` if `graph` is in the grammar's language up to wire-homeomorphism,
// `False` if not. When `out_trace_json` is non-null and the answer is
// `Ok`, it receives the witness derivation trace document.
//
// # Safety
// `grammar` and `graph` must be live handles; `out_trace_json` must be
// null or writable.
enum BesgStatus besg_grammar_member(const struct BesgGrammar *grammar,
                                    const struct BesgGraph *graph,
                                    char **out_trace_json);

// Runs a derivation trace document to completion and decodes the result.
//
// # Safety
// `grammar` must be a live handle, `trace_json` a NUL-terminated string and
// `out_graph` writable.
enum BesgStatus besg_grammar_concrete_derive(const struct BesgGrammar *grammar,
                                             const char *trace_json,
                                             struct BesgGraph **out_graph);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BESG_H */
