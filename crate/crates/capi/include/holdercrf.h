/* C interface for the holdercrf opinion holder extraction toolkit. */

#ifndef HOLDERCRF_H
#define HOLDERCRF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum holdercrf_status {
  /**
   * Success.
   */
  HOLDERCRF_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  HOLDERCRF_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  HOLDERCRF_INVALID_UTF8 = 2,
  /**
   * File could not be read or written.
   */
  HOLDERCRF_IO = 3,
  /**
   * Input data failed to parse or validate.
   */
  HOLDERCRF_PARSE = 4,
  /**
   * Training or decoding failed internally.
   */
  HOLDERCRF_INTERNAL = 5,
} holdercrf_status;

/**
 * Opaque trained-model handle.
 */
typedef struct holdercrf_model holdercrf_model;

/**
 * Training knobs; zero-initialize and override, or pass NULL for defaults.
 * A `window` of 0 is replaced by the default radius 3.
 */
typedef struct holdercrf_train_options {
  uint32_t window;
  double sigma2;
  uint32_t max_iters;
  double tol;
  /**
   * 0 = L-BFGS, nonzero = gradient descent.
   */
  uint8_t use_gradient_descent;
  /**
   * Nonzero decodes with invalid BIO transitions forbidden instead of
   * repaired.
   */
  uint8_t forbid_invalid_transitions;
} holdercrf_train_options;

/**
 * Exact-match scores as ratios in [0, 1].
 */
typedef struct holdercrf_prf {
  uint64_t true_positives;
  uint64_t retrieved;
  uint64_t relevant;
  double precision;
  double recall;
  double f_measure;
} holdercrf_prf;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *holdercrf_last_error(void);

/**
 * Crate version as a static NUL-terminated string.
 */
const char *holdercrf_version(void);

/**
 * Loads a model file. On success writes a heap-allocated handle to `out`.
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must point to writable storage.
 */
enum holdercrf_status holdercrf_model_load(const char *path, struct holdercrf_model **out);

/**
 * Saves a model to `path` in the versioned text format.
 *
 * # Safety
 * `model` must be a live handle from this library; `path` NUL-terminated.
 */
enum holdercrf_status holdercrf_model_save(const struct holdercrf_model *model, const char *path);

/**
 * Releases a handle returned by load or train. NULL is a no-op.
 *
 * # Safety
 * `model` must originate from this library and not be freed twice.
 */
void holdercrf_model_free(struct holdercrf_model *model);

/**
 * Number of trained parameters (weights).
 *
 * # Safety
 * `model` must be a live handle; `out` writable.
 */
enum holdercrf_status holdercrf_model_num_parameters(const struct holdercrf_model *model,
                                                     size_t *out);

/**
 * Number of distinct feature strings in the model's index.
 *
 * # Safety
 * `model` must be a live handle; `out` writable.
 */
enum holdercrf_status holdercrf_model_num_features(const struct holdercrf_model *model,
                                                   size_t *out);

/**
 * Trains a model on a gold column corpus. Resource paths may be NULL; a
 * supplied pattern file is used as-is for the PATTERN feature. On success
 * writes a handle to `out`.
 *
 * # Safety
 * All non-NULL strings must be NUL-terminated; `out` must be writable;
 * `options` may be NULL or point to a valid options struct.
 */
enum holdercrf_status holdercrf_train_file(const char *corpus,
                                           const char *subj_lexicon,
                                           const char *sem_lexicon,
                                           const char *pos_rules,
                                           const char *patterns,
                                           const struct holdercrf_train_options *options,
                                           struct holdercrf_model **out);

/**
 * Tags a gold column corpus with a trained model and writes the tagged
 * corpus to `out_path`. The resource and feature arguments must match the
 * ones used at training time.
 *
 * # Safety
 * `model` must be a live handle; all non-NULL strings NUL-terminated.
 */
enum holdercrf_status holdercrf_tag_file(const struct holdercrf_model *model,
                                         const char *corpus,
                                         const char *subj_lexicon,
                                         const char *sem_lexicon,
                                         const char *pos_rules,
                                         const char *patterns,
                                         const struct holdercrf_train_options *options,
                                         const char *out_path);

/**
 * Exact-match scores of a predicted column corpus against a gold one of the
 * same shape. Writes the result to `out`.
 *
 * # Safety
 * `gold` and `pred` must be NUL-terminated; `out` must be writable.
 */
enum holdercrf_status holdercrf_evaluate_files(const char *gold,
                                               const char *pred,
                                               struct holdercrf_prf *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOLDERCRF_H */
