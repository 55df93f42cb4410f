/* ritree: Random Indexing K-tree document clustering.
 *
 * C API over the clustering core. All heap objects are opaque handles
 * released with their matching _close function; every fallible call
 * returns a ritree_status, with detail available from ritree_last_error()
 * on the calling thread.
 */
#ifndef RITREE_H
#define RITREE_H

#include <stddef.h>
#include <stdint.h>

#ifndef RITREE_API
#if defined(_WIN32)
#define RITREE_API __declspec(dllimport)
#else
#define RITREE_API __attribute__((visibility("default")))
#endif
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ritree_status {
    RITREE_OK = 0,
    RITREE_E_IO = 1,
    RITREE_E_PARSE = 2,
    RITREE_E_FORMAT = 3,
    RITREE_E_CONFIG = 4,
    RITREE_E_ZERO_VECTOR = 5,
    RITREE_E_DIMENSION_MISMATCH = 6,
    RITREE_E_EMPTY_INPUT = 7,
    RITREE_E_DUPLICATE_DOC_ID = 8,
    RITREE_E_UNKNOWN_DOC_ID = 9,
    RITREE_E_INVALID_STATS = 10,
    RITREE_E_TOO_FEW_POINTS = 11,
    RITREE_E_EMPTY_NODE = 12,
    RITREE_E_BAD_LEVEL = 13,
    RITREE_E_TOO_FEW_CLUSTERS = 14,
    RITREE_E_DEGENERATE_SAMPLE = 15,
    RITREE_E_MISSING_LABEL = 16,
    RITREE_E_NOT_UNIT = 17,
    RITREE_E_EMPTY_TABLE = 18,
    RITREE_E_INTERNAL = 19,
    RITREE_E_INVALID_ARGUMENT = 20
} ritree_status;

RITREE_API const char *ritree_version(void);
RITREE_API const char *ritree_status_name(ritree_status status);
/* Message for the most recent failure on this thread; never NULL. */
RITREE_API const char *ritree_last_error(void);

typedef struct ritree_corpus ritree_corpus;
typedef struct ritree_matrix ritree_matrix;
typedef struct ritree_registry ritree_registry;
typedef struct ritree_ktree ritree_ktree;
typedef struct ritree_report ritree_report;

/* ---- corpus -----------------------------------------------------------
 * Corpus file: one document per line, `doc_id<TAB>term:count ...`.
 * Links file: `doc_id<TAB>doc_id`. Labels file: `doc_id<TAB>label`.
 * Stop-word file: one term per line. Any path but the corpus may be NULL.
 */
RITREE_API ritree_status ritree_corpus_open(const char *corpus_path,
                                            const char *links_path,
                                            const char *labels_path,
                                            const char *stopwords_path,
                                            ritree_corpus **out);
RITREE_API void ritree_corpus_close(ritree_corpus *corpus);
RITREE_API size_t ritree_corpus_docs(const ritree_corpus *corpus);
RITREE_API size_t ritree_corpus_terms(const ritree_corpus *corpus);
RITREE_API double ritree_corpus_avg_doc_len(const ritree_corpus *corpus);

/* ---- encoding ---------------------------------------------------------
 * repr: "bm25" or "bm25+lfidf". reduce: "none", "cull" or "ri".
 * dims is the reduced dimensionality (r for ri, n_keep for cull);
 * seed_len is the index-vector sparsity and only applies to ri.
 * Every output row is unit-norm.
 */
RITREE_API ritree_status ritree_encode(const ritree_corpus *corpus, const char *repr,
                                       const char *reduce, size_t dims, size_t seed_len,
                                       uint64_t rng_seed, ritree_matrix **out);
RITREE_API ritree_status ritree_matrix_open(const char *path, ritree_matrix **out);
RITREE_API ritree_status ritree_matrix_save(const ritree_matrix *matrix, const char *path);
RITREE_API void ritree_matrix_close(ritree_matrix *matrix);
RITREE_API size_t ritree_matrix_rows(const ritree_matrix *matrix);
RITREE_API size_t ritree_matrix_dims(const ritree_matrix *matrix);
RITREE_API ritree_status ritree_matrix_row(const ritree_matrix *matrix, size_t index,
                                           const double **values, const char **doc_id);

/* ---- index-vector registry ---------------------------------------------
 * Sparse ternary index vectors, created deterministically per term from
 * the registry seed. File format: `term<TAB>+dim -dim ...` where the sign
 * carries the ternary value.
 */
RITREE_API ritree_status ritree_registry_create(size_t dims, size_t seed_len,
                                                uint64_t rng_seed, ritree_registry **out);
RITREE_API ritree_status ritree_registry_open(const char *path, size_t dims,
                                              size_t seed_len, uint64_t rng_seed,
                                              ritree_registry **out);
RITREE_API void ritree_registry_close(ritree_registry *registry);
RITREE_API size_t ritree_registry_size(const ritree_registry *registry);
RITREE_API ritree_status ritree_registry_save(const ritree_registry *registry,
                                              const char *path);
/* Writes the term's non-zero positions as +/-(dim+1); *len gets the
 * entry count. cap must be at least seed_len. */
RITREE_API ritree_status ritree_registry_vector(ritree_registry *registry,
                                                const char *term, int64_t *entries,
                                                size_t cap, size_t *len);

/* ---- k-tree ------------------------------------------------------------
 * Height-balanced cluster tree. variant: "unmodified" (centroids are
 * exact subtree means) or "modified" (unit centroids, randomized
 * restarted splits; inserted vectors must be unit-norm).
 */
RITREE_API ritree_status ritree_ktree_create(size_t order, const char *variant,
                                             uint64_t rng_seed, ritree_ktree **out);
RITREE_API void ritree_ktree_close(ritree_ktree *tree);
RITREE_API ritree_status ritree_ktree_insert(ritree_ktree *tree, const double *vector,
                                             size_t dims, const char *doc_id);
/* Builds a tree over a whole matrix; shuffle != 0 draws the insertion
 * order from rng_seed. */
RITREE_API ritree_status ritree_ktree_build(const ritree_matrix *matrix, size_t order,
                                            const char *variant, uint64_t rng_seed,
                                            int shuffle, ritree_ktree **out);
RITREE_API size_t ritree_ktree_depth(const ritree_ktree *tree);
RITREE_API uint64_t ritree_ktree_size(const ritree_ktree *tree);
RITREE_API size_t ritree_ktree_dims(const ritree_ktree *tree);
/* Number of entries at a 1-based level (1 = root, depth = data vectors). */
RITREE_API ritree_status ritree_ktree_level_size(const ritree_ktree *tree, size_t level,
                                                 size_t *out);
RITREE_API ritree_status ritree_ktree_save(const ritree_ktree *tree, const char *path);
RITREE_API ritree_status ritree_ktree_open(const char *path, ritree_ktree **out);
/* doc_id<TAB>codebook_cluster_index, one line per document. */
RITREE_API ritree_status ritree_ktree_save_assignments(const ritree_ktree *tree,
                                                       const char *path);
/* Structural audit: height balance, occupancy, weight conservation and
 * the variant's centroid invariant. */
RITREE_API ritree_status ritree_ktree_validate(const ritree_ktree *tree);

/* ---- evaluation -------------------------------------------------------- */
typedef struct ritree_eval_opts {
    char config_id[16];
    char variant[16]; /* "unmodified" | "modified" */
    char repr[16];    /* "bm25" | "bm25+lfidf" */
    char reduce[8];   /* "none" | "cull" | "ri" */
    const size_t *dims; /* dimensionalities to sweep */
    size_t n_dims;
    size_t seed_len;
    size_t order;
    size_t k;          /* final cluster count */
    size_t runs_tree;
    size_t runs_reduce;
    uint64_t rng_seed;
    unsigned jobs;
} ritree_eval_opts;

RITREE_API ritree_eval_opts ritree_eval_opts_default(void);
/* Fills config_id/variant/repr/reduce for preset letters A..E. */
RITREE_API ritree_status ritree_eval_opts_preset(char letter, ritree_eval_opts *opts);

/* Builds runs_tree trees per dimensionality (fresh shuffle and index
 * vectors each), reduces each codebook to k clusters runs_reduce times
 * with k-means++, and scores micro purity/entropy against the labels. */
RITREE_API ritree_status ritree_evaluate(const ritree_corpus *corpus,
                                         const ritree_eval_opts *opts,
                                         ritree_report **out);
RITREE_API void ritree_report_close(ritree_report *report);
RITREE_API size_t ritree_report_rows(const ritree_report *report);
RITREE_API ritree_status ritree_report_row(const ritree_report *report, size_t index,
                                           const char **config_id, size_t *dims,
                                           double *alpha, double *beta, double *gamma,
                                           double *delta, size_t *runs);
/* tsv_path gets the summary table; runs_csv_path (may be NULL) gets one
 * line per measurement for later significance testing. */
RITREE_API ritree_status ritree_report_save(const ritree_report *report,
                                            const char *tsv_path,
                                            const char *runs_csv_path);

/* Per-dimension Welch t-tests on micro purity between two per-run CSVs;
 * writes a TSV with significance flags at p < 0.05. */
RITREE_API ritree_status ritree_compare(const char *runs_csv_a, const char *runs_csv_b,
                                        const char *out_tsv);

/* ---- metric primitives ------------------------------------------------- */
RITREE_API ritree_status ritree_welch_t_test(const double *a, size_t len_a,
                                             const double *b, size_t len_b, double *t,
                                             double *p);
/* counts is row-major cluster x label. */
RITREE_API ritree_status ritree_micro_purity(const uint64_t *counts, size_t n_clusters,
                                             size_t n_labels, double *out);
RITREE_API ritree_status ritree_micro_entropy(const uint64_t *counts, size_t n_clusters,
                                              size_t n_labels, double *out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RITREE_H */
