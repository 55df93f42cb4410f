#include "ritree/matrix.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

namespace ritree {

EncodedMatrix reduce_and_unitize(const FullSpaceDocs& docs, Reduce reduce,
                                 std::size_t dims, std::uint32_t seed_len,
                                 std::uint64_t rng_seed) {
    EncodedMatrix m;
    m.doc_ids = docs.doc_ids;

    if (reduce == Reduce::ri) {
        RiConfig config;
        config.r = static_cast<std::uint32_t>(dims);
        config.seed_len = seed_len;
        config.rng_seed = rng_seed;
        IndexVectorRegistry registry(config);
        m.rows = encode_corpus(registry, docs.rows, docs.dim_keys, docs.doc_ids);
        m.dims = dims;
        return m;
    }

    std::vector<SparseVector> rows = docs.rows;
    std::size_t out_dim = rows.empty() ? 0 : rows.front().dim;
    if (reduce == Reduce::cull) {
        tfidf_cull(rows, out_dim, dims);
        out_dim = std::min(out_dim, dims);
    }
    m.dims = out_dim;
    m.rows.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        DenseVector v = densify(rows[i]);
        try {
            unit_normalize_inplace(v);
        } catch (const Error& e) {
            if (e.code() != Errc::zero_vector) throw;
            fail(Errc::zero_vector, "document '" + docs.doc_ids[i] + "': " + e.what());
        }
        m.rows.push_back(std::move(v));
    }
    return m;
}

void save_matrix(const EncodedMatrix& m, std::ostream& out) {
    out << "#ritree-matrix dims=" << m.dims << " n=" << m.rows.size() << '\n';
    char buf[64];
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        out << m.doc_ids[i] << '\t';
        const auto& row = m.rows[i];
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out << ' ';
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), row[j]);
            (void)ec;
            out.write(buf, ptr - buf);
        }
        out << '\n';
    }
}

void save_matrix_file(const EncodedMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(Errc::io, "cannot write " + path);
    save_matrix(m, out);
}

EncodedMatrix load_matrix(std::istream& in) {
    EncodedMatrix m;
    std::string line;
    if (!std::getline(in, line)) fail(Errc::format, "matrix: empty stream");
    std::size_t dims = 0, n = 0;
    if (std::sscanf(line.c_str(), "#ritree-matrix dims=%zu n=%zu", &dims, &n) != 2)
        fail(Errc::format, "matrix: bad header '" + line + "'");
    m.dims = dims;

    std::unordered_set<std::string> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0)
            fail(Errc::format, "matrix line " + std::to_string(line_no) +
                                   ": expected doc_id<TAB>coords");
        std::string doc_id = line.substr(0, tab);
        if (!seen.insert(doc_id).second)
            fail(Errc::duplicate_doc_id,
                 "matrix line " + std::to_string(line_no) + ": duplicate doc '" + doc_id + "'");
        DenseVector row;
        row.reserve(dims);
        std::size_t pos = tab + 1;
        while (pos < line.size()) {
            while (pos < line.size() && line[pos] == ' ') ++pos;
            if (pos >= line.size()) break;
            std::size_t end = line.find(' ', pos);
            if (end == std::string::npos) end = line.size();
            double x = 0.0;
            auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, x);
            if (ec != std::errc() || ptr != line.data() + end || !std::isfinite(x))
                fail(Errc::format, "matrix line " + std::to_string(line_no) +
                                       ": bad coordinate '" +
                                       line.substr(pos, end - pos) + "'");
            row.push_back(x);
            pos = end;
        }
        if (row.size() != dims)
            fail(Errc::format, "matrix line " + std::to_string(line_no) + ": got " +
                                   std::to_string(row.size()) + " coords, expected " +
                                   std::to_string(dims));
        m.doc_ids.push_back(std::move(doc_id));
        m.rows.push_back(std::move(row));
    }
    if (m.rows.size() != n)
        fail(Errc::format, "matrix: header says n=" + std::to_string(n) + " but found " +
                               std::to_string(m.rows.size()) + " rows");
    return m;
}

EncodedMatrix load_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open " + path);
    return load_matrix(in);
}

}  // namespace ritree
