#ifndef TWOBELL_H
#define TWOBELL_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every C entry point.
typedef enum TwobellStatus {
  TWOBELL_OK = 0,
  TWOBELL_NULL_POINTER = 1,
  TWOBELL_INVALID_ARGUMENT = 2,
  TWOBELL_NOT_NORMALIZED = 3,
  TWOBELL_NOT_CONSTRUCTIBLE = 4,
  TWOBELL_ZERO_PROBABILITY = 5,
  TWOBELL_PROTOCOL_FAILURE = 6,
  TWOBELL_PANIC = 7,
} TwobellStatus;

// Opaque protocol-run transcript.
typedef struct TwobellTranscript TwobellTranscript;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code.
const char *twobell_status_message(enum TwobellStatus status);

// Run the protocol with seeded random coefficients and a sampled
// outcome. `variant` is "two-cnot" or "paper-literal"; `channel` is a
// pair like "phi+:phi+".
//
// # Safety
// `variant` and `channel` must be valid NUL-terminated strings and
// `out` a valid pointer; the returned handle must be released with
// [`twobell_transcript_free`].
enum TwobellStatus twobell_run_random(uint64_t seed,
                                      uint64_t trial,
                                      const char *variant,
                                      const char *channel,
                                      struct TwobellTranscript **out);

// Run the protocol with explicit coefficients: eight reals in (re, im)
// pairs for alpha..delta. `forced_outcome` may be NULL for sampled
// branches or a pair like "phi-:psi+" to force one.
//
// # Safety
// `coefficients` must point to eight doubles; string arguments must be
// valid NUL-terminated strings (or NULL where documented); `out` must
// be a valid pointer.
enum TwobellStatus twobell_run_coefficients(const double *coefficients,
                                            uint64_t seed,
                                            uint64_t trial,
                                            const char *variant,
                                            const char *channel,
                                            const char *forced_outcome,
                                            struct TwobellTranscript **out);

// Fidelity of the reconstructed eight-qubit state, in [0, 1].
//
// # Safety
// `transcript` must be a live handle from a `twobell_run_*` call.
double twobell_transcript_fidelity_8q(const struct TwobellTranscript *transcript);

// Fidelity of the teleported two-qubit carrier, in [0, 1].
//
// # Safety
// `transcript` must be a live handle from a `twobell_run_*` call.
double twobell_transcript_fidelity_2q(const struct TwobellTranscript *transcript);

// Classical bits the sender transmitted (4 for this protocol).
//
// # Safety
// `transcript` must be a live handle from a `twobell_run_*` call.
uint32_t twobell_transcript_classical_bits(const struct TwobellTranscript *transcript);

// Serialize the transcript as JSON into a newly allocated string.
//
// # Safety
// `transcript` must be a live handle and `out` a valid pointer; free
// the string with [`twobell_string_free`].
enum TwobellStatus twobell_transcript_json(const struct TwobellTranscript *transcript, char **out);

// Release a transcript handle. NULL is a no-op.
//
// # Safety
// `transcript` must be NULL or a handle not yet freed.
void twobell_transcript_free(struct TwobellTranscript *transcript);

// Release a string returned by this library. NULL is a no-op.
//
// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void twobell_string_free(char *s);

// Run the identity-verification suite. `corrupt_branch` injects a
// single-branch table corruption when in 0..16 (pass -1 for the
// canonical table); `all_hold` reports whether every identity held;
// `json_out` (optional, may be NULL) receives the full report array.
//
// # Safety
// `all_hold` must be a valid pointer; `json_out` NULL or valid; any
// returned string must be freed with [`twobell_string_free`].
enum TwobellStatus twobell_verify(uint64_t seed,
                                  int32_t corrupt_branch,
                                  bool *all_hold,
                                  char **json_out);

// Resource comparison of both schemes as a JSON document.
//
// # Safety
// `variant` must be a valid NUL-terminated string and `out` a valid
// pointer; free the string with [`twobell_string_free`].
enum TwobellStatus twobell_resources_json(const char *variant, char **out);

// Bell pairs required for `n_unknown` unknown coefficients
// (ceil(log2 n)); fails for n = 0.
//
// # Safety
// `out` must be a valid pointer.
enum TwobellStatus twobell_min_bell_pairs(uint32_t n_unknown, uint32_t *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TWOBELL_H */
