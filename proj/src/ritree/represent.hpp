#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "ritree/vecspace.hpp"

namespace ritree {

struct BM25Params {
    double k1 = 2.0;
    double b = 0.75;
};

enum class Repr { bm25, bm25_lfidf };
enum class Reduce { none, cull, ri };

Repr repr_from_string(const std::string& name);
Reduce reduce_from_string(const std::string& name);
const char* repr_name(Repr r);
const char* reduce_name(Reduce r);

struct CorpusStats {
    std::size_t n_docs = 0;
    std::size_t n_terms = 0;
    double avg_doc_len = 0.0;
    std::vector<std::uint32_t> df;       // term id -> document frequency
    std::vector<std::uint32_t> link_df;  // doc ordinal -> distinct linked documents
};

struct RawDoc {
    std::string doc_id;
    // (term id, count), sorted by term id, counts merged per term.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> term_counts;
    std::uint64_t length = 0;  // total token count after stop-word removal
};

struct Vocabulary {
    std::vector<std::string> terms;  // id -> term, first-encounter order
    std::unordered_map<std::string, std::uint32_t> ids;

    std::uint32_t get_or_add(const std::string& term);
};

// A document as weighted sparse vectors: BM25 over the term vocabulary,
// LF-IDF over the document space (empty when no links were loaded).
struct WeightedDoc {
    std::string doc_id;
    SparseVector terms;
    SparseVector links;
};

struct Corpus {
    Vocabulary vocab;
    std::vector<RawDoc> docs;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> links;  // doc ordinals
    std::unordered_map<std::string, std::uint32_t> doc_ords;
    std::unordered_map<std::string, std::string> labels;
    CorpusStats stats;

    std::uint32_t doc_ord(const std::string& doc_id) const;
};

// One document per line: doc_id<TAB>term:count term:count ...
// Stop words are dropped before any statistic is computed.
Corpus ingest_corpus(std::istream& in,
                     const std::unordered_set<std::string>& stopwords = {});
Corpus ingest_corpus_file(const std::string& path,
                          const std::string& stopwords_path = "");

// One link per line: doc_id<TAB>doc_id. Populates corpus.links and
// stats.link_df; both endpoints must already be known.
void load_links(Corpus& corpus, std::istream& in);
void load_links_file(Corpus& corpus, const std::string& path);

// doc_id<TAB>label
void load_labels(Corpus& corpus, std::istream& in);
void load_labels_file(Corpus& corpus, const std::string& path);

std::unordered_set<std::string> load_stopwords_file(const std::string& path);

// Lowercase, split on non-alphanumerics, drop stop words. Raw-text hook
// for callers that do not have pre-tokenized counts; stemming is left to
// external preprocessing.
std::vector<std::pair<std::string, std::uint32_t>> tokenize(
    const std::string& text, const std::unordered_set<std::string>& stopwords = {});

// w = idf * tf*(k1+1) / (k1*((1-b) + b*doc_len/avg_doc_len) + tf)
// with idf = max(0, ln((n_docs - df + 0.5)/(df + 0.5))).
double bm25_weight(std::uint32_t tf, std::uint32_t df, std::uint64_t doc_len,
                   const CorpusStats& stats, const BM25Params& params);

// BM25 term vectors for every document; terms whose clamped idf is zero
// are not stored.
std::vector<WeightedDoc> weight_docs(const Corpus& corpus, const BM25Params& params);

// Symmetric link frequency counts: every (i,j) line adds one at i->j and
// j->i, so a mutual pair records two.
std::vector<std::unordered_map<std::uint32_t, std::uint32_t>> build_link_freq(
    const Corpus& corpus);

// Link frequencies scaled by idf(target) = ln(n_docs / (1 + link_df[target])).
// Rows are deliberately not normalized. Fills WeightedDoc::links in place.
void lfidf_build(const Corpus& corpus, std::vector<WeightedDoc>& docs);

struct CullResult {
    // new dim -> original term id, ordered by descending rank
    // (ties: lower original id first).
    std::vector<std::uint32_t> kept;
    bool identity = false;  // n_keep >= vocabulary: docs left untouched
};

// Rank every term by its summed weight over all documents (column sums)
// and keep the n_keep best, re-indexing rows onto the survivors.
CullResult tfidf_cull(std::vector<SparseVector>& rows, std::size_t vocab_size,
                      std::size_t n_keep);

// concat(unit(content), unit(links)); throws ZeroVector if either part
// has zero norm. Pass an empty links vector to get unit(content) alone.
DenseVector combine(const DenseVector& content, const DenseVector& links);

// Documents as sparse rows of the full (pre-reduction) space, with one
// registry key per dimension for random indexing. bm25 rows live in the
// term space; bm25+lfidf rows concatenate the unit content half with the
// unit link half in a t + n_docs space. A document missing one half
// keeps the other half unit rather than failing the whole corpus.
struct FullSpaceDocs {
    std::vector<std::string> doc_ids;
    std::vector<SparseVector> rows;
    std::vector<std::string> dim_keys;
};

FullSpaceDocs build_full_space(const Corpus& corpus, Repr repr,
                               const BM25Params& params = {});

}  // namespace ritree
