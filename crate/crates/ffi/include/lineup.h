#ifndef LINEUP_H
#define LINEUP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum LineupStatus {
  LINEUP_STATUS_OK = 0,
  /**
   * File could not be read or written.
   */
  LINEUP_STATUS_IO = 1,
  /**
   * Malformed input: bad schema, CSV, JSON or UTF-8.
   */
  LINEUP_STATUS_SCHEMA = 2,
  /**
   * Input is well formed but violates an operation's requirements.
   */
  LINEUP_STATUS_PRECONDITION = 3,
  /**
   * A required pointer argument was null.
   */
  LINEUP_STATUS_NULL_ARGUMENT = 4,
  /**
   * Internal failure; the call had no effect.
   */
  LINEUP_STATUS_PANIC = 5,
} LineupStatus;

/**
 * Opaque dataset handle.
 */
typedef struct LineupDataset LineupDataset;

/**
 * Opaque lineup handle.
 */
typedef struct LineupLineup LineupLineup;

typedef struct LineupDifficulty {
  double delta;
  size_t gamma;
  /**
   * True when delta > 0.
   */
  bool easy;
} LineupDifficulty;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into this library on the same thread.
 */
const char *lineup_last_error(void);

/**
 * Loads a CSV file validated against a JSON schema file.
 *
 * # Safety
 * Path arguments must be NUL-terminated strings; `out` must be writable.
 */
enum LineupStatus lineup_dataset_load(const char *csv_path,
                                      const char *schema_path,
                                      struct LineupDataset **out);

/**
 * Number of rows, or 0 for a null handle.
 *
 * # Safety
 * `data` must be null or a live handle.
 */
size_t lineup_dataset_rows(const struct LineupDataset *data);

/**
 * # Safety
 * `data` must be null or a handle not yet freed.
 */
void lineup_dataset_free(struct LineupDataset *data);

/**
 * Builds a lineup of `m` panels. `plot_type` is one of `scatter`,
 * `scatter_with_regression`, `boxplot_pair`, `projection_1d`,
 * `projection_2d`; `question` may be null.
 *
 * # Safety
 * Pointer arguments must be valid; `out` must be writable.
 */
enum LineupStatus lineup_generate(const struct LineupDataset *data,
                                  const char *mechanism_json,
                                  size_t m,
                                  uint64_t seed,
                                  const char *plot_type,
                                  const char *question,
                                  struct LineupLineup **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum LineupStatus lineup_lineup_load(const char *path, struct LineupLineup **out);

/**
 * # Safety
 * `lineup` must be a live handle and `path` a NUL-terminated string.
 */
enum LineupStatus lineup_lineup_save(const struct LineupLineup *lineup, const char *path);

/**
 * Panel count, or 0 for a null handle.
 *
 * # Safety
 * `lineup` must be null or a live handle.
 */
size_t lineup_lineup_m(const struct LineupLineup *lineup);

/**
 * 1-based position of the real-data panel, or 0 for a null handle.
 *
 * # Safety
 * `lineup` must be null or a live handle.
 */
size_t lineup_lineup_true_position(const struct LineupLineup *lineup);

/**
 * # Safety
 * `lineup` must be null or a handle not yet freed.
 */
void lineup_lineup_free(struct LineupLineup *lineup);

/**
 * Distance between two datasets under a metric given as JSON, e.g.
 * `{"kind":"BN","p":8,"q":8}`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum LineupStatus lineup_distance(const struct LineupDataset *x,
                                  const struct LineupDataset *y,
                                  const char *metric_json,
                                  double *out);

/**
 * δ, γ and verdict of a lineup under a metric.
 *
 * # Safety
 * `lineup` must be live; `out` must be writable.
 */
enum LineupStatus lineup_difficulty(const struct LineupLineup *lineup,
                                    const char *metric_json,
                                    struct LineupDifficulty *out);

/**
 * Fills `samples[0..n]` with the empirical null distribution of the mean
 * distance.
 *
 * # Safety
 * `samples` must point to at least `n` writable doubles.
 */
enum LineupStatus lineup_empirical_distribution(const struct LineupDataset *data,
                                                const char *mechanism_json,
                                                const char *metric_json,
                                                size_t m,
                                                size_t n,
                                                uint64_t seed,
                                                double *samples);

/**
 * Renders the lineup as SVG; the true panel is marked only if `reveal`.
 *
 * # Safety
 * `lineup` must be live; `out` must be writable. Free the result with
 * [`lineup_string_free`].
 */
enum LineupStatus lineup_render_svg(const struct LineupLineup *lineup, bool reveal, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void lineup_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINEUP_H */
