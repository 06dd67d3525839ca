#ifndef CLUSTEX_H
#define CLUSTEX_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum ClustexStatus {
  CLUSTEX_STATUS_OK = 0,
  CLUSTEX_STATUS_NULL_ARGUMENT = 1,
  CLUSTEX_STATUS_INVALID_ARGUMENT = 2,
  CLUSTEX_STATUS_EMPTY_CORESET = 3,
  CLUSTEX_STATUS_SOLVER_FAILURE = 4,
  CLUSTEX_STATUS_TOO_MANY_CANDIDATES = 5,
  CLUSTEX_STATUS_BUFFER_TOO_SMALL = 6,
  CLUSTEX_STATUS_INTERNAL = 7,
} ClustexStatus;

// An opaque private clustering result; explanations are served from it.
typedef struct ClustexClustering ClustexClustering;

// An opaque, unit-ball-normalized dataset.
typedef struct ClustexDataset ClustexDataset;

// Pipeline parameters; obtain defaults from [`clustex_default_config`].
typedef struct ClustexConfig {
  // Number of centers.
  size_t k;
  // Cost exponent: 1 = k-median, 2 = k-means.
  uint32_t p;
  // Privacy budget (ignored when `noise_disabled`).
  double epsilon;
  // Reduction failure probability, in (0, 1).
  double beta;
  // Coreset accuracy parameter, in (0, 1].
  double alpha;
  // Reduced dimension; 0 means "use the data dimension".
  size_t d_prime;
  // Candidate-set granularity for p = 2, in (0, 1].
  double gamma;
  // Master seed for all randomness.
  uint64_t seed;
  // Test mode: disables all noise. The output is NOT private.
  bool noise_disabled;
} ClustexConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *clustex_version(void);

// Human-readable description of a status code (static storage).
const char *clustex_status_message(enum ClustexStatus status);

// Sensible defaults: k-median, k = 5, epsilon = 1.
struct ClustexConfig clustex_default_config(void);

// Builds a dataset from `n` rows of `d` raw coordinates (row-major) and
// normalizes it into the unit ball.
//
// # Safety
// `coords` must point to `n * d` readable doubles; `out` must be a valid
// destination for one pointer.
enum ClustexStatus clustex_dataset_create(const double *coords,
                                          size_t n,
                                          size_t d,
                                          struct ClustexDataset **out);

// Number of points.
size_t clustex_dataset_len(const struct ClustexDataset *ds);

// Point dimension.
size_t clustex_dataset_dim(const struct ClustexDataset *ds);

// Normalization scale: multiply squared/linear costs by `scale^p` to return
// to original units.
double clustex_dataset_scale(const struct ClustexDataset *ds);

// # Safety
// `ds` must come from [`clustex_dataset_create`] and not be used afterwards.
void clustex_dataset_destroy(struct ClustexDataset *ds);

// Runs the private clustering pipeline.
//
// # Safety
// `ds` must be a live dataset handle; `out` must be a valid destination.
enum ClustexStatus clustex_private_clustering(const struct ClustexDataset *ds,
                                              struct ClustexConfig cfg,
                                              struct ClustexClustering **out);

// Released clustering cost.
double clustex_clustering_cost(const struct ClustexClustering *h);

// Number of centers.
size_t clustex_clustering_k(const struct ClustexClustering *h);

// Center dimension.
size_t clustex_clustering_dim(const struct ClustexClustering *h);

// Coreset size (weighted representative count).
size_t clustex_clustering_coreset_size(const struct ClustexClustering *h);

// Total privacy budget spent by the pipeline.
double clustex_clustering_budget_spent(const struct ClustexClustering *h);

// Copies the centers (row-major `k x dim`) into `buf`.
//
// # Safety
// `buf` must hold at least `buf_len` doubles.
enum ClustexStatus clustex_clustering_centers(const struct ClustexClustering *h,
                                              double *buf,
                                              size_t buf_len);

// Computes contrastive explanations for the given agent indices from the
// released coreset; spends no additional privacy budget. Writes one value
// per agent into `out_values`.
//
// # Safety
// `agents` must hold `count` indices below the dataset size; `out_values`
// must hold `count` doubles.
enum ClustexStatus clustex_explanations(const struct ClustexClustering *h,
                                        const size_t *agents,
                                        size_t count,
                                        double *out_values);

// # Safety
// `h` must come from [`clustex_private_clustering`] and not be used afterwards.
void clustex_clustering_destroy(struct ClustexClustering *h);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CLUSTEX_H */
