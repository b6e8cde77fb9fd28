#ifndef ABC_CRITIC_H
#define ABC_CRITIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of a fallible call.
 */
typedef enum AbcStatus {
  AbcStatusOk = 0,
  AbcStatusNullPointer = 1,
  AbcStatusInvalidArgument = 2,
  AbcStatusUnsupported = 3,
  AbcStatusRuntimeFailure = 4,
} AbcStatus;

/**
 * Opaque error-prior handle.
 */
typedef struct AbcErrorPrior AbcErrorPrior;

/**
 * Opaque generative-model handle.
 */
typedef struct AbcModel AbcModel;

/**
 * Opaque error-posterior handle.
 */
typedef struct AbcPosterior AbcPosterior;

/**
 * Opaque sampler-run handle.
 */
typedef struct AbcRunResult AbcRunResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Crate version as a static NUL-terminated string.
 */
const char *abc_version(void);

/**
 * New Poisson model with a unit-rate exponential prior.
 */
struct AbcModel *abc_model_poisson_exp_new(void);

/**
 * New Binomial model with a uniform success prior; null if `trials < 1`.
 */
struct AbcModel *abc_model_binomial_new(uint64_t trials);

/**
 * New Gaussian location model; null unless `prior_sd > 0`.
 */
struct AbcModel *abc_model_location_new(double prior_mean, double prior_sd);

/**
 * # Safety
 * `model` must be a pointer returned by an `abc_model_*_new` function
 * that has not been freed yet, or null (a no-op).
 */
void abc_model_free(struct AbcModel *model);

/**
 * New heavy-tailed integer prior truncated at `trunc`; null if `trunc < 1`.
 */
struct AbcErrorPrior *abc_prior_cauchy_new(int64_t trunc);

/**
 * New uniform integer prior on `{-half_width, ..., half_width}`; null if
 * `half_width < 0`.
 */
struct AbcErrorPrior *abc_prior_uniform_new(int64_t half_width);

/**
 * New Gaussian prior on the real line; null unless `sd > 0`.
 */
struct AbcErrorPrior *abc_prior_gaussian_new(double mean, double sd);

/**
 * # Safety
 * `prior` must be a pointer returned by an `abc_prior_*_new` function
 * that has not been freed yet, or null (a no-op).
 */
void abc_prior_free(struct AbcErrorPrior *prior);

/**
 * Evidence of the Poisson model at observed count `x0`: exactly
 * `2^-(x0+1)`.
 *
 * # Safety
 * `out` must be a valid pointer to a writable f64.
 */
enum AbcStatus abc_poisson_evidence(int64_t x0, double *out);

/**
 * New Poisson error posterior truncated at `trunc`; null unless
 * `0 <= x0 < trunc`.
 */
struct AbcPosterior *abc_poisson_error_posterior_new(int64_t x0, int64_t trunc);

/**
 * New Binomial error posterior (uniform `1/(2*trials+1)`); null unless
 * `0 <= x0 <= trials` and `trials >= 1`.
 */
struct AbcPosterior *abc_binomial_error_posterior_new(int64_t trials, int64_t x0);

/**
 * Posterior mass at lattice point `k` (zero off support).
 *
 * # Safety
 * `post` must be a live posterior handle; `out` a writable f64 pointer.
 */
enum AbcStatus abc_posterior_pmf(const struct AbcPosterior *post, int64_t k, double *out);

/**
 * Tail-area p-value of the posterior (inclusive tie rule).
 *
 * # Safety
 * `post` must be a live posterior handle; `out` a writable f64 pointer.
 */
enum AbcStatus abc_posterior_pvalue_tail(const struct AbcPosterior *post, double *out);

/**
 * Upper bound on the probability mass lost to truncation.
 *
 * # Safety
 * `post` must be a live posterior handle; `out` a writable f64 pointer.
 */
enum AbcStatus abc_posterior_tail_bound(const struct AbcPosterior *post, double *out);

/**
 * # Safety
 * `post` must be a pointer returned by an `abc_*_posterior_new` function
 * that has not been freed yet, or null (a no-op).
 */
void abc_posterior_free(struct AbcPosterior *post);

/**
 * Evidence from the exact-match acceptance rate on a discrete model.
 * The observation is a dataset holding the single value `x0`.
 *
 * # Safety
 * `model` must be a live model handle; `out_value` and `out_std_error`
 * must be writable f64 pointers.
 */
enum AbcStatus abc_evidence_exact_match(const struct AbcModel *model,
                                        double x0,
                                        uint64_t proposals,
                                        uint64_t seed,
                                        double *out_value,
                                        double *out_std_error);

/**
 * Error-augmented exact-match rejection run; the accepted pairs follow
 * the joint error-and-parameter posterior.
 *
 * # Safety
 * `model` and `prior` must be live handles; `out_run` must be a writable
 * pointer slot that receives the new run handle on success.
 */
enum AbcStatus abc_run_mu_reject(const struct AbcModel *model,
                                 const struct AbcErrorPrior *prior,
                                 double x0,
                                 uint64_t proposals,
                                 uint64_t seed,
                                 struct AbcRunResult **out_run);

/**
 * Number of retained draws.
 *
 * # Safety
 * `run` must be a live run handle; `out` a writable u64 pointer.
 */
enum AbcStatus abc_run_len(const struct AbcRunResult *run, uint64_t *out);

/**
 * Acceptance rate of the run.
 *
 * # Safety
 * `run` must be a live run handle; `out` a writable f64 pointer.
 */
enum AbcStatus abc_run_acceptance_rate(const struct AbcRunResult *run, double *out);

/**
 * Normalized error marginal over `len` lattice points starting at
 * `eps_lo`, written into `out[0..len]`.
 *
 * # Safety
 * `run` must be a live run handle; `out` must point to at least `len`
 * writable f64 slots.
 */
enum AbcStatus abc_run_eps_marginal(const struct AbcRunResult *run,
                                    int64_t eps_lo,
                                    uintptr_t len,
                                    double *out);

/**
 * # Safety
 * `run` must be a pointer returned by `abc_run_mu_reject` that has not
 * been freed yet, or null (a no-op).
 */
void abc_run_free(struct AbcRunResult *run);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ABC_CRITIC_H */
