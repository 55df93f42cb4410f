#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ritree/randindex.hpp"
#include "ritree/represent.hpp"
#include "ritree/vecspace.hpp"

namespace ritree {

// Row-major doc_id-keyed dense matrix of encoded document vectors.
struct EncodedMatrix {
    std::size_t dims = 0;
    std::vector<std::string> doc_ids;
    std::vector<DenseVector> rows;
};

// Applies the chosen dimensionality reduction and unitizes every row.
// dims is r for ri, n_keep for cull, and ignored for none. ri rows come
// out of the registry already unit-norm; the others are normalized here.
EncodedMatrix reduce_and_unitize(const FullSpaceDocs& docs, Reduce reduce,
                                 std::size_t dims, std::uint32_t seed_len,
                                 std::uint64_t rng_seed);

// Text format: header line `#ritree-matrix dims=<d> n=<n>`, then one
// `doc_id<TAB>v0 v1 ...` line per document, coordinates printed with
// round-trip precision.
void save_matrix(const EncodedMatrix& m, std::ostream& out);
void save_matrix_file(const EncodedMatrix& m, const std::string& path);
EncodedMatrix load_matrix(std::istream& in);
EncodedMatrix load_matrix_file(const std::string& path);

}  // namespace ritree
