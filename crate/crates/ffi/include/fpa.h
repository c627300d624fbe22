#ifndef FPA_H
#define FPA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FpaStatus {
  FPA_STATUS_OK = 0,
  FPA_STATUS_NULL_POINTER = 1,
  FPA_STATUS_INVALID_UTF8 = 2,
  FPA_STATUS_PARSE = 3,
  FPA_STATUS_SHAPE_MISMATCH = 4,
  FPA_STATUS_INADMISSIBLE = 5,
  FPA_STATUS_DEGREE_EXCEEDED = 6,
  FPA_STATUS_DOMAIN = 7,
  FPA_STATUS_NO_CONVERGENCE = 8,
  FPA_STATUS_ZERO_CONSTANT = 9,
  FPA_STATUS_PANIC = 10,
} FpaStatus;

// Commutative (static map) series handle.
typedef struct FpaCommSeries FpaCommSeries;

// Noncommutative series handle.
typedef struct FpaSeries FpaSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread. Valid until the next call
// that fails; never null.
const char *fpa_last_error_message(void);

// Releases a string returned by this library. Null is ignored.
void fpa_string_free(char *s);

// Parses `.ncfps` text.
enum FpaStatus fpa_series_parse(const char *src, struct FpaSeries **out);

// Serializes to `.ncfps` text.
enum FpaStatus fpa_series_to_string(const struct FpaSeries *s, char **out);

void fpa_series_free(struct FpaSeries *s);

// Number of inputs `m`, outputs `ell` and truncation degree. Any out
// pointer may be null.
enum FpaStatus fpa_series_shape(const struct FpaSeries *s,
                                size_t *inputs,
                                size_t *outputs,
                                size_t *maxdeg);

// Coefficient of `word` (e.g. "x0x1", or "e" for the empty word) in output
// `component`, as an exact rational string and optionally as a double.
enum FpaStatus fpa_series_coeff(const struct FpaSeries *s,
                                const char *word,
                                size_t component,
                                char **exact,
                                double *approx);

// Parses `.cfps` text.
enum FpaStatus fpa_comm_parse(const char *src, struct FpaCommSeries **out);

// Serializes to `.cfps` text.
enum FpaStatus fpa_comm_to_string(const struct FpaCommSeries *d, char **out);

void fpa_comm_free(struct FpaCommSeries *d);

enum FpaStatus fpa_shuffle(const struct FpaSeries *a,
                           const struct FpaSeries *b,
                           int32_t maxdeg,
                           struct FpaSeries **out);

enum FpaStatus fpa_shuffle_inverse(const struct FpaSeries *c,
                                   int32_t maxdeg,
                                   struct FpaSeries **out);

// Composition `c∘d`.
enum FpaStatus fpa_compose(const struct FpaSeries *c,
                           const struct FpaSeries *d,
                           int32_t maxdeg,
                           struct FpaSeries **out);

// Mixed composition `c∘̃d_δ`.
enum FpaStatus fpa_mixed_compose(const struct FpaSeries *c,
                                 const struct FpaSeries *d,
                                 int32_t maxdeg,
                                 struct FpaSeries **out);

// Inverse in the output feedback group.
enum FpaStatus fpa_group_inverse(const struct FpaSeries *c, int32_t maxdeg, struct FpaSeries **out);

// Wiener-Fliess composition `d∘̆c`.
enum FpaStatus fpa_wf_compose(const struct FpaCommSeries *d,
                              const struct FpaSeries *c,
                              int32_t maxdeg,
                              struct FpaSeries **out);

enum FpaStatus fpa_static_feedback(const struct FpaSeries *c,
                                   const struct FpaCommSeries *d,
                                   int32_t maxdeg,
                                   struct FpaSeries **out);

enum FpaStatus fpa_dynamic_feedback(const struct FpaSeries *c,
                                    const struct FpaSeries *d,
                                    int32_t maxdeg,
                                    struct FpaSeries **out);

// Static feedback by fixed-point iteration. `iterations` may be null.
enum FpaStatus fpa_static_feedback_fixed_point(const struct FpaSeries *c,
                                               const struct FpaCommSeries *d,
                                               int32_t maxdeg,
                                               struct FpaSeries **out,
                                               size_t *iterations);

// Relative degree of a single-input single-output series. `r` is set to -1
// when undefined; `truncation_limited` to 1 when the truncation is too short
// to decide.
enum FpaStatus fpa_relative_degree(const struct FpaSeries *c,
                                   int32_t *r,
                                   int32_t *truncation_limited);

// Seminorm at radius `radius` over the stored truncation.
enum FpaStatus fpa_seminorm(const struct FpaSeries *c, double radius, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FPA_H */
