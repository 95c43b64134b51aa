#ifndef LONELYBUS_H
#define LONELYBUS_H

/* This file is generated by cbindgen from lonelybus-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible function.
typedef enum LbStatus {
  LB_STATUS_OK = 0,
  // A required pointer argument was null.
  LB_STATUS_NULL_POINTER = 1,
  // A parameter was outside its documented range.
  LB_STATUS_INVALID_ARGUMENT = 2,
  // The instance would enumerate more configurations than the cap.
  LB_STATUS_CAP_EXCEEDED = 3,
  // An index argument was out of bounds for the handle.
  LB_STATUS_INDEX_OUT_OF_RANGE = 4,
} LbStatus;

// Opaque handle to an exact lonely-count distribution.
typedef struct LbPmf LbPmf;

// Opaque handle to an exact verification report.
typedef struct LbReport LbReport;

// Sampled tail estimate with its 95% Wilson interval.
typedef struct LbEstimate {
  double point;
  double ci_low;
  double ci_high;
  uint64_t hits;
  uint64_t trials;
  uint64_t seed;
  uint32_t workers;
} LbEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on the calling thread, or
// null when the last call succeeded. The pointer stays valid until the
// next lonelybus call on the same thread; do not free it.
const char *lb_last_error_message(void);

// Frees a string returned by this library. Null is a no-op.
//
// # Safety
//
// `s` must be a pointer previously returned by a lonelybus function and
// not yet freed.
void lb_string_free(char *s);

// Computes the exact distribution for `n` passengers on `k` buses and
// stores a handle in `*out`.
//
// # Safety
//
// `out` must be valid for writing one pointer.
enum LbStatus lb_pmf_new(uint32_t n, uint32_t k, struct LbPmf **out);

// Releases a distribution handle. Null is a no-op.
//
// # Safety
//
// `pmf` must come from [`lb_pmf_new`] and must not be used afterwards.
void lb_pmf_free(struct LbPmf *pmf);

// Passenger count of the distribution, or 0 when `pmf` is null.
//
// # Safety
//
// `pmf` must be a live handle or null.
uint32_t lb_pmf_n(const struct LbPmf *pmf);

// Bus count of the distribution, or 0 when `pmf` is null.
//
// # Safety
//
// `pmf` must be a live handle or null.
uint32_t lb_pmf_k(const struct LbPmf *pmf);

// Writes `P(L = s)` as a freshly allocated `"p/q"` string into `*out`.
//
// # Safety
//
// `pmf` must be a live handle; `out` must be valid for writing one pointer.
enum LbStatus lb_pmf_mass_rational(const struct LbPmf *pmf, uint32_t s, char **out);

// Writes `P(L = s)` as a decimal approximation into `*out`.
//
// # Safety
//
// `pmf` must be a live handle; `out` must be valid for writing one double.
enum LbStatus lb_pmf_mass_decimal(const struct LbPmf *pmf, uint32_t s, double *out);

// Writes `P(L >= r)` as a freshly allocated `"p/q"` string into `*out`.
//
// # Safety
//
// `pmf` must be a live handle; `out` must be valid for writing one pointer.
enum LbStatus lb_pmf_tail_rational(const struct LbPmf *pmf, uint32_t r, char **out);

// One-shot tail probability `P(L >= r)` as a `"p/q"` string.
//
// # Safety
//
// `out` must be valid for writing one pointer.
enum LbStatus lb_tail_prob_rational(uint32_t n, uint32_t k, uint32_t r, char **out);

// Exact expected lonely count `n * (1 - 1/k)^(n-1)` as a `"p/q"` string.
//
// # Safety
//
// `out` must be valid for writing one pointer.
enum LbStatus lb_expected_lonely_rational(uint32_t n, uint32_t k, char **out);

// Exhaustively verifies the existence theorem at `(n, k)` and stores a
// report handle in `*out`. `max_enum` caps the enumeration size; pass 0
// for the default of 10^8. `workers` may be 0 for single-threaded.
//
// # Safety
//
// `out` must be valid for writing one pointer.
enum LbStatus lb_verify_theorem1(uint32_t n,
                                 uint32_t k,
                                 uint64_t max_enum,
                                 uint32_t workers,
                                 struct LbReport **out);

// Exhaustively verifies the dominance theorem at `(n, k)` and threshold
// `r` (in `2..=n`), storing a report handle in `*out`. See
// [`lb_verify_theorem1`] for `max_enum` and `workers`.
//
// # Safety
//
// `out` must be valid for writing one pointer.
enum LbStatus lb_verify_theorem2(uint32_t n,
                                 uint32_t k,
                                 uint32_t r,
                                 uint64_t max_enum,
                                 uint32_t workers,
                                 struct LbReport **out);

// Releases a report handle. Null is a no-op.
//
// # Safety
//
// `report` must come from a verify call and must not be used afterwards.
void lb_report_free(struct LbReport *report);

// True iff every claim in the report holds. Null reports as false.
//
// # Safety
//
// `report` must be a live handle or null.
bool lb_report_all_pass(const struct LbReport *report);

// Number of claims in the report; 0 when `report` is null.
//
// # Safety
//
// `report` must be a live handle or null.
size_t lb_report_claim_count(const struct LbReport *report);

// Writes the claim's stable name into `*out` as a fresh string.
//
// # Safety
//
// `report` must be a live handle; `out` must be valid for one pointer.
enum LbStatus lb_report_claim_name(const struct LbReport *report, size_t index, char **out);

// Writes whether the claim holds into `*out`.
//
// # Safety
//
// `report` must be a live handle; `out` must be valid for one bool.
enum LbStatus lb_report_claim_holds(const struct LbReport *report, size_t index, bool *out);

// Writes the claim's exact left-hand side as a `"p/q"` string into `*out`.
//
// # Safety
//
// `report` must be a live handle; `out` must be valid for one pointer.
enum LbStatus lb_report_claim_lhs(const struct LbReport *report, size_t index, char **out);

// Writes the claim's exact right-hand side as a `"p/q"` string into `*out`.
//
// # Safety
//
// `report` must be a live handle; `out` must be valid for one pointer.
enum LbStatus lb_report_claim_rhs(const struct LbReport *report, size_t index, char **out);

// Writes the claim's required relation (`"<"`, `"<="`, `"="`, `">="`,
// `">"`) into `*out` as a fresh string.
//
// # Safety
//
// `report` must be a live handle; `out` must be valid for one pointer.
enum LbStatus lb_report_claim_relation(const struct LbReport *report, size_t index, char **out);

// Runs `trials` seeded allocations of `n` passengers on `k` buses and
// writes the estimate of `P(lonely count >= r)` into `*out`. Results are
// a pure function of `(n, k, r, trials, seed, workers)`.
//
// # Safety
//
// `out` must be valid for writing one `LbEstimate`.
enum LbStatus lb_estimate_tail(uint32_t n,
                               uint32_t k,
                               uint32_t r,
                               uint64_t trials,
                               uint64_t seed,
                               uint32_t workers,
                               struct LbEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LONELYBUS_H */
