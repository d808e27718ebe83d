#ifndef MMS_H
#define MMS_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum MmsStatus {
  MMS_STATUS_OK = 0,
  MMS_STATUS_NULL_POINTER = 1,
  MMS_STATUS_UTF8 = 2,
  MMS_STATUS_PARSE = 3,
  MMS_STATUS_SHAPE = 4,
  MMS_STATUS_CAP = 5,
  MMS_STATUS_INVALID_ARGUMENT = 6,
  MMS_STATUS_PANIC = 7,
} MmsStatus;

// Opaque scheme handle.
typedef struct MmsScheme MmsScheme;

// Enumeration caps for the canonicalization routines. A zero field keeps the
// library default.
typedef struct MmsLimits {
  uint64_t max_stabilizer;
  uint64_t max_nullspace;
} MmsLimits;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *mms_last_error_message(void);

struct MmsLimits mms_limits_default(void);

// Parses text holding exactly one scheme.
enum MmsStatus mms_scheme_parse(const char *text, struct MmsScheme **out);

enum MmsStatus mms_scheme_from_json(const char *text, struct MmsScheme **out);

// Releases a handle; null is ignored.
void mms_scheme_free(struct MmsScheme *scheme);

// Releases a string returned by this library; null is ignored.
void mms_string_free(char *s);

enum MmsStatus mms_scheme_serialize(const struct MmsScheme *scheme, char **out);

enum MmsStatus mms_scheme_to_json(const struct MmsScheme *scheme, char **out);

// Matrix dimension, or 0 for a null handle.
size_t mms_scheme_n(const struct MmsScheme *scheme);

// Number of rows, or 0 for a null handle.
size_t mms_scheme_r(const struct MmsScheme *scheme);

// Field modulus, or 0 for a null handle.
uint32_t mms_scheme_field(const struct MmsScheme *scheme);

enum MmsStatus mms_scheme_verify(const struct MmsScheme *scheme, bool *out);

// SHA-256 of the canonical serialization, written to 32 bytes at `out`.
enum MmsStatus mms_scheme_digest(const struct MmsScheme *scheme, uint8_t *out);

// Converts a scheme from the `A B = C` convention by transposing every C.
enum MmsStatus mms_scheme_transpose_c(const struct MmsScheme *scheme, struct MmsScheme **out);

// Computes the normal form. `limits` may be null. When `witness` is not
// null it receives the group element mapping the input to the normal form.
enum MmsStatus mms_normal_form(const struct MmsScheme *scheme,
                               const struct MmsLimits *limits,
                               struct MmsScheme **out,
                               char **witness);

// Decides equivalence. When the schemes are equivalent and `witness` is not
// null it receives a group element mapping `first` to `second`; otherwise it
// is set to null.
enum MmsStatus mms_equivalent(const struct MmsScheme *first,
                              const struct MmsScheme *second,
                              const struct MmsLimits *limits,
                              bool *out,
                              char **witness);

// Applies a group element in witness text form to a scheme.
enum MmsStatus mms_apply_witness(const struct MmsScheme *scheme,
                                 const char *witness,
                                 struct MmsScheme **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MMS_H */
