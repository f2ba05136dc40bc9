#ifndef WORDEQ_H
#define WORDEQ_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result of a call.
 */
typedef enum WqStatus {
  WQ_STATUS_OK = 0,
  WQ_STATUS_NULL_ARGUMENT = 1,
  WQ_STATUS_INVALID_UTF8 = 2,
  WQ_STATUS_PARSE = 3,
  WQ_STATUS_RESOURCE = 4,
  WQ_STATUS_CONTRACT = 5,
  WQ_STATUS_OUT_OF_RANGE = 6,
  WQ_STATUS_PANIC = 7,
} WqStatus;

/**
 * Answer of a solver call.
 */
typedef enum WqVerdict {
  WQ_VERDICT_SAT = 0,
  WQ_VERDICT_UNSAT = 1,
  WQ_VERDICT_UNKNOWN = 2,
} WqVerdict;

/**
 * A parsed equation.
 */
typedef struct WqEquation WqEquation;

/**
 * A solution together with the equation it solves and, when it came from
 * the search, the path of arcs that certifies it.
 */
typedef struct WqSolution WqSolution;

/**
 * Search limits. Fill with [`wq_config_default`].
 */
typedef struct WqConfig {
  uintptr_t max_len;
  uint64_t cap;
  uintptr_t max_depth;
  uintptr_t node_budget;
  uintptr_t branch_budget;
  bool dedup;
} WqConfig;

/**
 * The library defaults.
 */
struct WqConfig wq_config_default(void);

/**
 * Message of the last failed call on this thread, or null. Valid until
 * the next failing call.
 */
const char *wq_last_error_message(void);

/**
 * Parse an equation file.
 *
 * # Safety
 * `src` must be a NUL terminated string and `out` a valid pointer.
 */
enum WqStatus wq_equation_parse(const char *src, struct WqEquation **out);

/**
 * # Safety
 * `eq` must come from [`wq_equation_parse`] and not be freed twice.
 */
void wq_equation_free(struct WqEquation *eq);

/**
 * Search for a solution. On `Sat`, `*solution` receives a new handle;
 * otherwise it is set to null.
 *
 * # Safety
 * `eq` must be a live handle; `verdict` and `solution` valid pointers.
 */
enum WqStatus wq_solve(const struct WqEquation *eq,
                       struct WqConfig config,
                       enum WqVerdict *verdict,
                       struct WqSolution **solution);

/**
 * Exhaustive search over values of length at most `max_len`. `*solution`
 * is null when there is none.
 *
 * # Safety
 * `eq` must be a live handle and `solution` a valid pointer.
 */
enum WqStatus wq_oracle(const struct WqEquation *eq,
                        uintptr_t max_len,
                        uint64_t cap,
                        struct WqSolution **solution);

/**
 * `X = w` lines, one per variable pair.
 *
 * # Safety
 * `sol` must be a live handle.
 */
char *wq_solution_render(const struct WqSolution *sol);

/**
 * # Safety
 * `sol` must come from this library and not be freed twice.
 */
void wq_solution_free(struct WqSolution *sol);

/**
 * Certificate text for a solution found by [`wq_solve`].
 *
 * # Safety
 * `sol` must be a live handle and `out` a valid pointer.
 */
enum WqStatus wq_certificate_build(const struct WqSolution *sol, char **out);

/**
 * Check a certificate. `*valid` is false when it parses but is wrong; the
 * reason is then the last error message.
 *
 * # Safety
 * `src` must be a NUL terminated string and `valid` a valid pointer.
 */
enum WqStatus wq_certificate_verify(const char *src, uint64_t cap, bool *valid);

/**
 * Decide a formula file over a free group.
 *
 * # Safety
 * `src` must be a NUL terminated string and `verdict` a valid pointer.
 */
enum WqStatus wq_group_solve(const char *src, struct WqConfig config, enum WqVerdict *verdict);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void wq_string_free(char *s);

#endif  /* WORDEQ_H */
