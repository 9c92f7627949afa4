#ifndef MBE_H
#define MBE_H

#include <stddef.h>
#include <stdint.h>

typedef enum MbeStatus {
  MBE_STATUS_OK = 0,
  MBE_STATUS_NULL_POINTER = 1,
  MBE_STATUS_INVALID_ARGUMENT = 2,
  MBE_STATUS_IO = 3,
  MBE_STATUS_PARSE = 4,
  MBE_STATUS_OUT_OF_RANGE = 5,
  MBE_STATUS_FAILED = 6,
  MBE_STATUS_PANIC = 7,
} MbeStatus;

typedef enum MbeAlgorithm {
  MBE_ALGORITHM_DFS = 0,
  MBE_ALGORITHM_CONSENSUS = 1,
  MBE_ALGORITHM_CDFS = 2,
  MBE_ALGORITHM_CD0 = 3,
  MBE_ALGORITHM_CD1 = 4,
  MBE_ALGORITHM_CD2 = 5,
  MBE_ALGORITHM_CCONS = 6,
} MbeAlgorithm;

/**
 * An undirected graph, optionally with string vertex labels.
 */
typedef struct MbeGraph MbeGraph;

/**
 * The bicliques found by one enumeration.
 */
typedef struct MbeResult MbeResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version string of the library, static storage.
 */
const char *mbe_version(void);

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *mbe_last_error(void);

/**
 * Loads an edge-list file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MbeStatus mbe_graph_load(const char *path, struct MbeGraph **out);

/**
 * Builds a graph from `m` edges `(src[i], dst[i])`. Loops and duplicates are
 * dropped.
 *
 * # Safety
 * `src` and `dst` must point to `m` readable values (may be NULL when
 * `m == 0`) and `out` must be a valid pointer.
 */
enum MbeStatus mbe_graph_from_edges(const uint64_t *src,
                                    const uint64_t *dst,
                                    size_t m,
                                    struct MbeGraph **out);

/**
 * # Safety
 * `g` must be NULL or a handle from this library.
 */
size_t mbe_graph_vertex_count(const struct MbeGraph *g);

/**
 * # Safety
 * `g` must be NULL or a handle from this library.
 */
size_t mbe_graph_edge_count(const struct MbeGraph *g);

/**
 * Original label of vertex `id` for graphs loaded from labelled files, else
 * NULL. Owned by the graph.
 *
 * # Safety
 * `g` must be NULL or a handle from this library.
 */
const char *mbe_graph_label(const struct MbeGraph *g, uint64_t id);

/**
 * # Safety
 * `g` must be NULL or a handle from this library not yet freed.
 */
void mbe_graph_free(struct MbeGraph *g);

/**
 * Enumerates the maximal bicliques of `g` with both sides of size at least
 * `s`. `reducers` is ignored by the sequential algorithms.
 *
 * # Safety
 * `g` must be a live graph handle and `out` a valid pointer.
 */
enum MbeStatus mbe_enumerate(const struct MbeGraph *g,
                             enum MbeAlgorithm algorithm,
                             size_t s,
                             size_t reducers,
                             struct MbeResult **out);

/**
 * # Safety
 * `r` must be NULL or a live result handle.
 */
uint64_t mbe_result_count(const struct MbeResult *r);

/**
 * Number of bicliques addressable with [`mbe_result_biclique`].
 *
 * # Safety
 * `r` must be NULL or a live result handle.
 */
size_t mbe_result_len(const struct MbeResult *r);

/**
 * Sum of `|L|·|R|` over all bicliques.
 *
 * # Safety
 * `r` must be NULL or a live result handle.
 */
uint64_t mbe_result_edge_sum(const struct MbeResult *r);

/**
 * Borrows biclique `i`: its sides as ascending id arrays and the vertex of
 * the reducer that emitted it (the minimum vertex for sequential runs).
 * Arrays stay valid until the result is freed.
 *
 * # Safety
 * `r` must be a live result handle; every output pointer must be valid.
 */
enum MbeStatus mbe_result_biclique(const struct MbeResult *r,
                                   size_t i,
                                   const uint64_t **left,
                                   size_t *left_len,
                                   const uint64_t **right,
                                   size_t *right_len,
                                   uint64_t *owner);

/**
 * JSON job report of a pipeline run, or NULL for sequential algorithms.
 * Owned by the result.
 *
 * # Safety
 * `r` must be NULL or a live result handle.
 */
const char *mbe_result_job_report(const struct MbeResult *r);

/**
 * # Safety
 * `r` must be NULL or a result handle not yet freed.
 */
void mbe_result_free(struct MbeResult *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MBE_H */
