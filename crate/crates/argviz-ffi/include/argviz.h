#ifndef ARGVIZ_H
#define ARGVIZ_H

/* Generated by cbindgen from argviz-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible FFI call.
 */
typedef enum ArgvizStatus {
  ARGVIZ_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  ARGVIZ_STATUS_NULL_POINTER = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  ARGVIZ_STATUS_INVALID_UTF8 = 2,
  /**
   * The input text could not be parsed as APX/TGF.
   */
  ARGVIZ_STATUS_PARSE_ERROR = 3,
  /**
   * A generator rejected its parameters or is unavailable.
   */
  ARGVIZ_STATUS_GENERATOR_ERROR = 4,
  /**
   * An embedding, projection or metric computation failed.
   */
  ARGVIZ_STATUS_COMPUTE_ERROR = 5,
  /**
   * A numeric argument was out of range (e.g. wrong buffer length).
   */
  ARGVIZ_STATUS_INVALID_ARGUMENT = 6,
} ArgvizStatus;

/**
 * Opaque framework handle.
 */
typedef struct ArgvizFramework ArgvizFramework;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer is
 * owned by the library and valid until the next failing call on the thread.
 */
const char *argviz_last_error(void);

/**
 * Parses APX text (`arg(x).` / `att(a,b).`) into a new framework handle.
 *
 * # Safety
 * `text` must point to a NUL-terminated string; `out` must be a valid
 * pointer to receive the handle.
 */
enum ArgvizStatus argviz_framework_parse_apx(const char *text, struct ArgvizFramework **out);

/**
 * Parses TGF text (node ids, `#`, edge pairs) into a new framework handle.
 *
 * # Safety
 * `text` must point to a NUL-terminated string; `out` must be a valid
 * pointer to receive the handle.
 */
enum ArgvizStatus argviz_framework_parse_tgf(const char *text, struct ArgvizFramework **out);

/**
 * Generates a Sembuster instance with 3k arguments and k²+3k attacks.
 *
 * # Safety
 * `out` must be a valid pointer to receive the handle.
 */
enum ArgvizStatus argviz_framework_sembuster(uintptr_t k, struct ArgvizFramework **out);

/**
 * Releases a framework handle. Null is ignored.
 *
 * # Safety
 * `framework` must be a handle returned by this library, released at most
 * once.
 */
void argviz_framework_free(struct ArgvizFramework *framework);

/**
 * Number of arguments in the framework.
 *
 * # Safety
 * `framework` must be a live handle; `out` must be a valid pointer.
 */
enum ArgvizStatus argviz_framework_argument_count(const struct ArgvizFramework *framework,
                                                  uintptr_t *out);

/**
 * Number of attacks in the framework.
 *
 * # Safety
 * `framework` must be a live handle; `out` must be a valid pointer.
 */
enum ArgvizStatus argviz_framework_attack_count(const struct ArgvizFramework *framework,
                                                uintptr_t *out);

/**
 * Serializes the framework to APX. The returned string must be released
 * with [`argviz_string_free`].
 *
 * # Safety
 * `framework` must be a live handle; `out` must be a valid pointer.
 */
enum ArgvizStatus argviz_framework_to_apx(const struct ArgvizFramework *framework, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library, released at most once.
 */
void argviz_string_free(char *s);

/**
 * Computes a 2-D node layout: HOPE embedding with `d` dimensions per half,
 * then t-SNE with the given perplexity, iteration count and seed. `out_xy`
 * must hold exactly `2 * argument_count` doubles and is filled with
 * x0,y0,x1,y1,... in argument order.
 *
 * # Safety
 * `framework` must be a live handle; `out_xy` must point to `out_len`
 * writable doubles.
 */
enum ArgvizStatus argviz_node_layout(const struct ArgvizFramework *framework,
                                     uintptr_t d,
                                     double perplexity,
                                     uintptr_t iterations,
                                     uint64_t seed,
                                     double *out_xy,
                                     uintptr_t out_len);

/**
 * Cluster metrics over a 2-D layout: k-nearest-neighbour label agreement and
 * mean silhouette. `xy` holds `2 * n` doubles, `labels` holds `n`
 * NUL-terminated strings.
 *
 * # Safety
 * All pointers must be valid for the stated lengths.
 */
enum ArgvizStatus argviz_layout_metrics(const double *xy,
                                        uintptr_t n,
                                        const char *const *labels,
                                        uintptr_t k,
                                        double *out_knn,
                                        double *out_silhouette);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ARGVIZ_H */
