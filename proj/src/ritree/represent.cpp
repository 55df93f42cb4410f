#include "ritree/represent.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

namespace ritree {

namespace {

std::ifstream open_or_fail(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open " + path);
    return in;
}

std::uint32_t parse_count(std::string_view text, std::size_t line_no) {
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value == 0)
        fail(Errc::parse, "line " + std::to_string(line_no) + ": bad count '" +
                              std::string(text) + "'");
    return value;
}

}  // namespace

std::uint32_t Vocabulary::get_or_add(const std::string& term) {
    auto it = ids.find(term);
    if (it != ids.end()) return it->second;
    auto id = static_cast<std::uint32_t>(terms.size());
    terms.push_back(term);
    ids.emplace(term, id);
    return id;
}

std::uint32_t Corpus::doc_ord(const std::string& doc_id) const {
    auto it = doc_ords.find(doc_id);
    if (it == doc_ords.end()) fail(Errc::unknown_doc_id, "unknown doc id '" + doc_id + "'");
    return it->second;
}

Corpus ingest_corpus(std::istream& in, const std::unordered_set<std::string>& stopwords) {
    Corpus corpus;
    std::string line;
    std::size_t line_no = 0;
    std::uint64_t total_len = 0;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        std::string doc_id = line.substr(0, tab);
        if (doc_id.empty())
            fail(Errc::parse, "line " + std::to_string(line_no) + ": empty doc id");
        if (corpus.doc_ords.count(doc_id))
            fail(Errc::duplicate_doc_id,
                 "line " + std::to_string(line_no) + ": duplicate doc id '" + doc_id + "'");

        RawDoc doc;
        doc.doc_id = doc_id;
        // Duplicate term mentions on one line merge by summing counts.
        std::map<std::uint32_t, std::uint32_t> counts;
        if (tab != std::string::npos) {
            std::string_view rest(line);
            rest.remove_prefix(tab + 1);
            std::size_t pos = 0;
            while (pos < rest.size()) {
                while (pos < rest.size() && rest[pos] == ' ') ++pos;
                if (pos >= rest.size()) break;
                std::size_t end = rest.find(' ', pos);
                if (end == std::string_view::npos) end = rest.size();
                std::string_view pair = rest.substr(pos, end - pos);
                pos = end;
                const auto colon = pair.rfind(':');
                if (colon == std::string_view::npos || colon == 0 ||
                    colon + 1 == pair.size())
                    fail(Errc::parse, "line " + std::to_string(line_no) +
                                          ": expected term:count, got '" +
                                          std::string(pair) + "'");
                std::string term(pair.substr(0, colon));
                const std::uint32_t count = parse_count(pair.substr(colon + 1), line_no);
                if (stopwords.count(term)) continue;
                counts[corpus.vocab.get_or_add(term)] += count;
            }
        }
        for (auto [tid, c] : counts) {
            doc.term_counts.emplace_back(tid, c);
            doc.length += c;
        }
        total_len += doc.length;
        corpus.doc_ords.emplace(doc.doc_id, static_cast<std::uint32_t>(corpus.docs.size()));
        corpus.docs.push_back(std::move(doc));
    }

    auto& stats = corpus.stats;
    stats.n_docs = corpus.docs.size();
    stats.n_terms = corpus.vocab.terms.size();
    stats.avg_doc_len =
        stats.n_docs == 0 ? 0.0 : static_cast<double>(total_len) / stats.n_docs;
    stats.df.assign(stats.n_terms, 0);
    for (const auto& doc : corpus.docs)
        for (auto [tid, c] : doc.term_counts) stats.df[tid] += 1;
    stats.link_df.assign(stats.n_docs, 0);
    return corpus;
}

Corpus ingest_corpus_file(const std::string& path, const std::string& stopwords_path) {
    std::unordered_set<std::string> stopwords;
    if (!stopwords_path.empty()) stopwords = load_stopwords_file(stopwords_path);
    auto in = open_or_fail(path);
    return ingest_corpus(in, stopwords);
}

void load_links(Corpus& corpus, std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::unordered_set<std::uint32_t>> neighbors(corpus.docs.size());
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
            fail(Errc::parse, "links line " + std::to_string(line_no) +
                                  ": expected doc_id<TAB>doc_id");
        const std::uint32_t a = corpus.doc_ord(line.substr(0, tab));
        const std::uint32_t b = corpus.doc_ord(line.substr(tab + 1));
        corpus.links.emplace_back(a, b);
        neighbors[a].insert(b);
        neighbors[b].insert(a);
    }
    corpus.stats.link_df.assign(corpus.docs.size(), 0);
    for (std::size_t i = 0; i < neighbors.size(); ++i)
        corpus.stats.link_df[i] = static_cast<std::uint32_t>(neighbors[i].size());
}

void load_links_file(Corpus& corpus, const std::string& path) {
    auto in = open_or_fail(path);
    load_links(corpus, in);
}

void load_labels(Corpus& corpus, std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
            fail(Errc::parse, "labels line " + std::to_string(line_no) +
                                  ": expected doc_id<TAB>label");
        corpus.labels[line.substr(0, tab)] = line.substr(tab + 1);
    }
}

void load_labels_file(Corpus& corpus, const std::string& path) {
    auto in = open_or_fail(path);
    load_labels(corpus, in);
}

std::unordered_set<std::string> load_stopwords_file(const std::string& path) {
    auto in = open_or_fail(path);
    std::unordered_set<std::string> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.insert(line);
    return out;
}

std::vector<std::pair<std::string, std::uint32_t>> tokenize(
    const std::string& text, const std::unordered_set<std::string>& stopwords) {
    std::map<std::string, std::uint32_t> counts;
    std::string token;
    auto flush = [&] {
        if (!token.empty() && !stopwords.count(token)) counts[token] += 1;
        token.clear();
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        else
            flush();
    }
    flush();
    return {counts.begin(), counts.end()};
}

double bm25_weight(std::uint32_t tf, std::uint32_t df, std::uint64_t doc_len,
                   const CorpusStats& stats, const BM25Params& params) {
    if (stats.n_docs == 0 || stats.avg_doc_len <= 0.0)
        fail(Errc::invalid_stats, "bm25 over an empty corpus");
    const double n = static_cast<double>(stats.n_docs);
    const double idf = std::max(0.0, std::log((n - df + 0.5) / (df + 0.5)));
    const double len_norm =
        (1.0 - params.b) + params.b * static_cast<double>(doc_len) / stats.avg_doc_len;
    return idf * (tf * (params.k1 + 1.0)) / (params.k1 * len_norm + tf);
}

std::vector<WeightedDoc> weight_docs(const Corpus& corpus, const BM25Params& params) {
    std::vector<WeightedDoc> out;
    out.reserve(corpus.docs.size());
    const auto vocab_size = static_cast<std::uint32_t>(corpus.vocab.terms.size());
    for (const auto& doc : corpus.docs) {
        WeightedDoc wd;
        wd.doc_id = doc.doc_id;
        wd.terms.dim = vocab_size;
        wd.links.dim = static_cast<std::uint32_t>(corpus.docs.size());
        for (auto [tid, count] : doc.term_counts) {
            const double w =
                bm25_weight(count, corpus.stats.df[tid], doc.length, corpus.stats, params);
            if (w > 0.0) wd.terms.entries.push_back({tid, w});
        }
        out.push_back(std::move(wd));
    }
    return out;
}

std::vector<std::unordered_map<std::uint32_t, std::uint32_t>> build_link_freq(
    const Corpus& corpus) {
    std::vector<std::unordered_map<std::uint32_t, std::uint32_t>> freq(corpus.docs.size());
    for (auto [a, b] : corpus.links) {
        freq[a][b] += 1;
        freq[b][a] += 1;
    }
    return freq;
}

void lfidf_build(const Corpus& corpus, std::vector<WeightedDoc>& docs) {
    const auto freq = build_link_freq(corpus);
    const double n = static_cast<double>(corpus.stats.n_docs);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        auto& links = docs[i].links;
        links.dim = static_cast<std::uint32_t>(corpus.docs.size());
        links.entries.clear();
        std::vector<std::pair<std::uint32_t, double>> row;
        row.reserve(freq[i].size());
        for (auto [target, count] : freq[i]) {
            const double idf = std::log(n / (1.0 + corpus.stats.link_df[target]));
            const double w = count * idf;
            if (w != 0.0) row.emplace_back(target, w);
        }
        std::sort(row.begin(), row.end());
        for (auto [d, w] : row) links.entries.push_back({d, w});
    }
}

CullResult tfidf_cull(std::vector<SparseVector>& rows, std::size_t vocab_size,
                      std::size_t n_keep) {
    if (n_keep < 1) fail(Errc::config, "tfidf_cull: n_keep must be >= 1");
    CullResult result;
    if (n_keep >= vocab_size) {
        result.identity = true;
        result.kept.resize(vocab_size);
        for (std::size_t i = 0; i < vocab_size; ++i)
            result.kept[i] = static_cast<std::uint32_t>(i);
        return result;
    }

    std::vector<double> rank(vocab_size, 0.0);
    for (const auto& row : rows)
        for (const auto& e : row.entries) rank[e.dim] += e.value;

    std::vector<std::uint32_t> order(vocab_size);
    for (std::size_t i = 0; i < vocab_size; ++i) order[i] = static_cast<std::uint32_t>(i);
    // Descending rank; ties resolved toward the lower original term id.
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (rank[a] != rank[b]) return rank[a] > rank[b];
        return a < b;
    });
    order.resize(n_keep);
    result.kept = order;

    std::vector<std::uint32_t> remap(vocab_size, UINT32_MAX);
    for (std::size_t new_id = 0; new_id < order.size(); ++new_id)
        remap[order[new_id]] = static_cast<std::uint32_t>(new_id);

    for (auto& row : rows) {
        std::vector<SparseEntry> kept_entries;
        for (const auto& e : row.entries)
            if (remap[e.dim] != UINT32_MAX) kept_entries.push_back({remap[e.dim], e.value});
        std::sort(kept_entries.begin(), kept_entries.end(),
                  [](const SparseEntry& a, const SparseEntry& b) { return a.dim < b.dim; });
        row.dim = static_cast<std::uint32_t>(n_keep);
        row.entries = std::move(kept_entries);
    }
    return result;
}

DenseVector combine(const DenseVector& content, const DenseVector& links) {
    DenseVector out = unit_normalize(content);
    if (links.empty()) return out;
    DenseVector unit_links = unit_normalize(links);
    out.insert(out.end(), unit_links.begin(), unit_links.end());
    return out;
}

Repr repr_from_string(const std::string& name) {
    if (name == "bm25") return Repr::bm25;
    if (name == "bm25+lfidf") return Repr::bm25_lfidf;
    fail(Errc::config, "unknown representation '" + name + "'");
}

Reduce reduce_from_string(const std::string& name) {
    if (name == "none") return Reduce::none;
    if (name == "cull") return Reduce::cull;
    if (name == "ri") return Reduce::ri;
    fail(Errc::config, "unknown reduction '" + name + "'");
}

const char* repr_name(Repr r) { return r == Repr::bm25 ? "bm25" : "bm25+lfidf"; }

const char* reduce_name(Reduce r) {
    switch (r) {
        case Reduce::none: return "none";
        case Reduce::cull: return "cull";
        case Reduce::ri: return "ri";
    }
    return "?";
}

namespace {

// Scales sparse entries to unit norm and appends them to out at a
// dimension offset. Empty input appends nothing.
void append_unit_half(const SparseVector& part, std::uint32_t offset,
                      std::vector<SparseEntry>& out) {
    const double n = sparse_norm(part);
    if (n == 0.0) return;
    for (const auto& e : part.entries) out.push_back({offset + e.dim, e.value / n});
}

}  // namespace

FullSpaceDocs build_full_space(const Corpus& corpus, Repr repr, const BM25Params& params) {
    FullSpaceDocs out;
    auto weighted = weight_docs(corpus, params);
    if (repr == Repr::bm25_lfidf) lfidf_build(corpus, weighted);

    const auto t = static_cast<std::uint32_t>(corpus.vocab.terms.size());
    const auto n = static_cast<std::uint32_t>(corpus.docs.size());
    out.dim_keys = corpus.vocab.terms;
    if (repr == Repr::bm25_lfidf) {
        // Link dimensions are keyed by the target doc id behind a leading
        // space, which no term can carry.
        out.dim_keys.reserve(t + n);
        for (const auto& doc : corpus.docs) out.dim_keys.push_back(" " + doc.doc_id);
    }

    out.doc_ids.reserve(weighted.size());
    out.rows.reserve(weighted.size());
    for (auto& wd : weighted) {
        out.doc_ids.push_back(wd.doc_id);
        SparseVector row;
        if (repr == Repr::bm25) {
            row = std::move(wd.terms);
        } else {
            row.dim = t + n;
            append_unit_half(wd.terms, 0, row.entries);
            append_unit_half(wd.links, t, row.entries);
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

}  // namespace ritree
