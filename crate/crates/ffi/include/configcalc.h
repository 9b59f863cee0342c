#ifndef CONFIGCALC_H
#define CONFIGCALC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes of every fallible function.
 */
typedef enum CcStatus {
  CC_STATUS_OK = 0,
  CC_STATUS_NULL_POINTER = 1,
  CC_STATUS_INVALID_UTF8 = 2,
  /*
   Malformed JSON or a document of the wrong shape.
   */
  CC_STATUS_PARSE_ERROR = 3,
  /*
   Well-formed input that violates a mathematical requirement.
   */
  CC_STATUS_INVARIANT_ERROR = 4,
  /*
   The requested improvement does not exist.
   */
  CC_STATUS_NOT_SPLIT = 5,
  /*
   An index or buffer argument is out of range.
   */
  CC_STATUS_OUT_OF_RANGE = 6,
  /*
   Any other library error.
   */
  CC_STATUS_FAILED = 7,
  CC_STATUS_PANIC = 8,
} CcStatus;

/*
 Opaque configuration.
 */
typedef struct CcConfig CcConfig;

/*
 Opaque finite poset.
 */
typedef struct CcPoset CcPoset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or null. The pointer
 is valid until the next call into the library on this thread.
 */
const char *cc_last_error(void);

/*
 # Safety
 `s` must be null or a string returned by this library.
 */
void cc_string_free(char *s);

/*
 Parse a poset document.

 # Safety
 `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CcStatus cc_poset_from_json(const char *json, struct CcPoset **out);

/*
 # Safety
 `p` must be null or a handle from this library, not yet freed.
 */
void cc_poset_free(struct CcPoset *p);

/*
 # Safety
 `p` must be a live poset handle and `out` a valid pointer.
 */
enum CcStatus cc_poset_len(const struct CcPoset *p, size_t *out);

/*
 Whether `a <= b`, by label.

 # Safety
 `p` must be a live poset handle, `a` and `b` NUL-terminated strings.
 */
enum CcStatus cc_poset_leq(const struct CcPoset *p, const char *a, const char *b, bool *out);

/*
 Number of f-sets, including the empty set.

 # Safety
 `p` must be a live poset handle and `out` a valid pointer.
 */
enum CcStatus cc_poset_fset_count(const struct CcPoset *p, size_t *out);

/*
 # Safety
 `p` must be a live poset handle and `out` a valid pointer.
 */
enum CcStatus cc_poset_count_linear_extensions(const struct CcPoset *p, uint64_t *out);

/*
 Parse a configuration document, or build one from a subobject family
 or filtration document. `default_field` is used when the document
 names no field; pass 0 for none.

 # Safety
 `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CcStatus cc_config_from_json(const char *json, uint64_t default_field, struct CcConfig **out);

/*
 # Safety
 `c` must be null or a handle from this library, not yet freed.
 */
void cc_config_free(struct CcConfig *c);

/*
 Serialise a configuration as a JSON document.

 # Safety
 `c` must be a live configuration handle and `out` a valid pointer.
 */
enum CcStatus cc_config_to_json(const struct CcConfig *c, char **out);

/*
 Poset of a configuration, as a new handle.

 # Safety
 `c` must be a live configuration handle and `out` a valid pointer.
 */
enum CcStatus cc_config_poset(const struct CcConfig *c, struct CcPoset **out);

/*
 Number of failed axiom instances; zero means valid.

 # Safety
 `c` must be a live configuration handle and `out` a valid pointer.
 */
enum CcStatus cc_config_validate(const struct CcConfig *c, size_t *out);

/*
 Dimension vector of the simple summand at `element`. Writes the number
 of quiver vertices to `len` and, if `capacity` allows, the entries to
 `dims`.

 # Safety
 `c` and `element` must be valid, `dims` must have room for `capacity`
 entries and `len` must be a valid pointer.
 */
enum CcStatus cc_config_kappa(const struct CcConfig *c,
                              const char *element,
                              size_t *dims,
                              size_t capacity,
                              size_t *len);

/*
 Whether the short exact sequence at the covering pair `(i, j)` splits.

 # Safety
 `c` must be a live configuration handle, `i` and `j` NUL-terminated
 labels and `out` a valid pointer.
 */
enum CcStatus cc_config_split(const struct CcConfig *c, const char *i, const char *j, bool *out);

/*
 # Safety
 `c` must be a live configuration handle and `out` a valid pointer.
 */
enum CcStatus cc_config_is_best(const struct CcConfig *c, bool *out);

/*
 Dimension of the parameter space of improvements at `(i, j)`.

 # Safety
 As for [`cc_config_split`].
 */
enum CcStatus cc_config_parameter_dim(const struct CcConfig *c,
                                      const char *i,
                                      const char *j,
                                      size_t *out);

/*
 The improvement at `(i, j)` with the given parameter coordinates.

 # Safety
 As for [`cc_config_split`]; `param` must point to `param_len` values
 (it may be null when `param_len` is 0).
 */
enum CcStatus cc_config_improve(const struct CcConfig *c,
                                const char *i,
                                const char *j,
                                const uint32_t *param,
                                size_t param_len,
                                struct CcConfig **out);

/*
 Improve greedily until no covering pair splits. `steps` receives the
 number of improvements made.

 # Safety
 `c` must be a live configuration handle; `out` and `steps` valid
 pointers.
 */
enum CcStatus cc_config_best_search(const struct CcConfig *c, struct CcConfig **out, size_t *steps);

/*
 Library version as a static string.
 */
const char *cc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONFIGCALC_H */
