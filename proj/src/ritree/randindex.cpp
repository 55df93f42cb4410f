#include "ritree/randindex.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <unordered_set>

#include "ritree/rng.hpp"

namespace ritree {

namespace {

void check_config(const RiConfig& c) {
    if (c.seed_len < 2 || c.seed_len > c.r)
        fail(Errc::config, "seed_len must be in [2, r]");
    if (c.seed_len % 2 != 0)
        fail(Errc::config, "seed_len must be even to balance +1/-1 entries");
}

// seed_len distinct dimensions via Floyd's sampling, then a shuffled
// balanced multiset of signs assigned to the sorted dimensions.
SparseVector make_index_vector(std::mt19937_64& rng, std::uint32_t r,
                               std::uint32_t seed_len) {
    std::unordered_set<std::uint32_t> chosen;
    chosen.reserve(seed_len * 2);
    for (std::uint32_t j = r - seed_len; j < r; ++j) {
        std::uniform_int_distribution<std::uint32_t> dist(0, j);
        const std::uint32_t t = dist(rng);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<std::uint32_t> dims(chosen.begin(), chosen.end());
    std::sort(dims.begin(), dims.end());

    std::vector<double> signs(seed_len, 1.0);
    std::fill(signs.begin() + seed_len / 2, signs.end(), -1.0);
    std::shuffle(signs.begin(), signs.end(), rng);

    SparseVector v;
    v.dim = r;
    v.entries.reserve(seed_len);
    for (std::uint32_t i = 0; i < seed_len; ++i) v.entries.push_back({dims[i], signs[i]});
    return v;
}

}  // namespace

IndexVectorRegistry::IndexVectorRegistry(RiConfig config)
    : config_(config),
      mutex_(std::make_unique<std::mutex>()),
      stream_(rng::engine(rng::derive(config.rng_seed, "ri-stream"))) {
    check_config(config_);
}

std::size_t IndexVectorRegistry::size() const {
    std::lock_guard<std::mutex> lock(*mutex_);
    return order_.size();
}

bool IndexVectorRegistry::contains(std::string_view term) const {
    std::lock_guard<std::mutex> lock(*mutex_);
    return map_.count(std::string(term)) > 0;
}

std::vector<std::string> IndexVectorRegistry::keys() const {
    std::lock_guard<std::mutex> lock(*mutex_);
    return order_;
}

const SparseVector& IndexVectorRegistry::get_or_create(std::string_view term) {
    std::string key(term);
    {
        std::lock_guard<std::mutex> lock(*mutex_);
        auto it = map_.find(key);
        if (it != map_.end()) return it->second;
    }
    // Generate outside the lock; a racing creator produces the identical
    // vector, and element references survive rehashing.
    auto term_rng = rng::engine(rng::derive(config_.rng_seed, term));
    SparseVector v = make_index_vector(term_rng, config_.r, config_.seed_len);
    std::lock_guard<std::mutex> lock(*mutex_);
    auto [it, inserted] = map_.emplace(std::move(key), std::move(v));
    if (inserted) order_.push_back(it->first);
    return it->second;
}

SparseVector IndexVectorRegistry::generate_index_vector() {
    std::lock_guard<std::mutex> lock(*mutex_);
    return make_index_vector(stream_, config_.r, config_.seed_len);
}

void IndexVectorRegistry::save(std::ostream& out) const {
    std::lock_guard<std::mutex> lock(*mutex_);
    for (const auto& key : order_) {
        out << key << '\t';
        const auto& entries = map_.at(key).entries;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (i) out << ' ';
            out << (entries[i].value > 0 ? '+' : '-') << entries[i].dim;
        }
        out << '\n';
    }
}

void IndexVectorRegistry::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) fail(Errc::io, "cannot write " + path);
    save(out);
}

IndexVectorRegistry IndexVectorRegistry::load(std::istream& in, RiConfig config) {
    IndexVectorRegistry reg(config);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0)
            fail(Errc::parse, "registry line " + std::to_string(line_no) +
                                  ": expected term<TAB>signed dims");
        std::string key = line.substr(0, tab);
        SparseVector v;
        v.dim = config.r;
        std::size_t pos = tab + 1;
        int positives = 0;
        while (pos < line.size()) {
            while (pos < line.size() && line[pos] == ' ') ++pos;
            if (pos >= line.size()) break;
            const char sign = line[pos];
            if (sign != '+' && sign != '-')
                fail(Errc::parse, "registry line " + std::to_string(line_no) +
                                      ": entry must start with + or -");
            ++pos;
            std::size_t end = line.find(' ', pos);
            if (end == std::string::npos) end = line.size();
            std::uint32_t dim = 0;
            auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, dim);
            if (ec != std::errc() || ptr != line.data() + end)
                fail(Errc::parse,
                     "registry line " + std::to_string(line_no) + ": bad dimension");
            v.entries.push_back({dim, sign == '+' ? 1.0 : -1.0});
            positives += sign == '+' ? 1 : 0;
            pos = end;
        }
        std::sort(v.entries.begin(), v.entries.end(),
                  [](const SparseEntry& a, const SparseEntry& b) { return a.dim < b.dim; });
        v.validate();
        if (v.entries.size() != config.seed_len ||
            positives != static_cast<int>(config.seed_len / 2))
            fail(Errc::format, "registry line " + std::to_string(line_no) +
                                   ": vector violates seed_len/balance for this config");
        if (reg.map_.count(key))
            fail(Errc::format,
                 "registry line " + std::to_string(line_no) + ": duplicate term");
        reg.order_.push_back(key);
        reg.map_.emplace(std::move(key), std::move(v));
    }
    return reg;
}

IndexVectorRegistry IndexVectorRegistry::load_file(const std::string& path,
                                                   RiConfig config) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open " + path);
    return load(in, config);
}

DenseVector encode_document(IndexVectorRegistry& registry, const SparseVector& row,
                            std::span<const std::string> dim_keys) {
    if (row.dim != dim_keys.size())
        fail(Errc::dimension_mismatch,
             "encode: row dim " + std::to_string(row.dim) + " vs " +
                 std::to_string(dim_keys.size()) + " keys");
    DenseVector acc(registry.config().r, 0.0);
    for (const auto& e : row.entries)
        accumulate(acc, registry.get_or_create(dim_keys[e.dim]), e.value);
    unit_normalize_inplace(acc);  // ZeroVector on exact cancellation
    return acc;
}

std::vector<DenseVector> encode_corpus(IndexVectorRegistry& registry,
                                       std::span<const SparseVector> rows,
                                       std::span<const std::string> dim_keys,
                                       std::span<const std::string> doc_ids) {
    std::vector<DenseVector> out;
    out.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        try {
            out.push_back(encode_document(registry, rows[i], dim_keys));
        } catch (const Error& e) {
            if (e.code() != Errc::zero_vector) throw;
            const std::string id =
                i < doc_ids.size() ? doc_ids[i] : ("#" + std::to_string(i));
            fail(Errc::zero_vector, "document '" + id + "': " + e.what());
        }
    }
    return out;
}

}  // namespace ritree
