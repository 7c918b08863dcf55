/* C interface to the bundle isomorphism engine. */

#ifndef BLOWUP_MODULI_H
#define BLOWUP_MODULI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a C-interface call. Anything but `Ok` leaves a message in
 * `blowup_last_error`.
 */
typedef enum {
  BLOWUP_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  BLOWUP_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  BLOWUP_STATUS_INVALID_UTF8 = 2,
  /**
   * The input parsed but was rejected (bad JSON, window violation,
   * level mismatch, truncation box below the level minimum).
   */
  BLOWUP_STATUS_BAD_INPUT = 3,
  /**
   * The certificate parsed but does not prove its claim.
   */
  BLOWUP_STATUS_VERIFY_FAILED = 4,
  /**
   * The form has no preimage under the embedding.
   */
  BLOWUP_STATUS_NOT_IN_IMAGE = 5,
} BlowupStatus;

/**
 * Opaque handle to a canonical form.
 */
typedef struct BlowupForm BlowupForm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call on the same thread. Never null.
 */
const char *blowup_last_error(void);

/**
 * Parses a form from its JSON record (`{"j": ..., "coeffs": [...]}`).
 */
BlowupStatus blowup_form_from_json(const char *json, BlowupForm **out);

/**
 * Draws the seeded random form at the given level; equal arguments give
 * equal forms across platforms and runs.
 */
BlowupStatus blowup_form_random(int32_t j, uint64_t seed, BlowupForm **out);

/**
 * Serializes a form to its JSON record. The caller frees the string.
 */
BlowupStatus blowup_form_to_json(const BlowupForm *form, char **out);

/**
 * Level of the form, or -1 for a null handle.
 */
int32_t blowup_form_level(const BlowupForm *form);

/**
 * 1 when the form lies in the image of the embedding from the level
 * below, 0 when not, -1 for a null handle.
 */
int32_t blowup_form_in_image(const BlowupForm *form);

/**
 * Sends the form one level up.
 */
BlowupStatus blowup_phi(const BlowupForm *form, BlowupForm **out);

/**
 * Recovers the form one level down; fails with `NotInImage` when the
 * input is outside the image of the embedding.
 */
BlowupStatus blowup_phi_inverse(const BlowupForm *form, BlowupForm **out);

/**
 * Decides whether two same-level forms are isomorphic and returns the
 * verdict as a JSON record (the same schema the CLI emits, certificate
 * included for positive verdicts). Nonpositive `u_max` or `z_max` select
 * the per-level defaults; `cap` bounds the deepening retries.
 */
BlowupStatus blowup_decide_iso(const BlowupForm *p,
                               const BlowupForm *q,
                               int32_t u_max,
                               int32_t z_max,
                               uint32_t cap,
                               char **out);

/**
 * Re-verifies a certificate record exactly, with no truncation. `Ok`
 * means the certificate proves its claim.
 */
BlowupStatus blowup_verify_certificate(const char *cert_json);

/**
 * Releases a form handle. Null is a no-op.
 */
void blowup_form_free(BlowupForm *form);

/**
 * Releases a string returned by this library. Null is a no-op.
 */
void blowup_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* BLOWUP_MODULI_H */
