#pragma once

#include <stdexcept>
#include <string>

namespace ritree {

// One code per failure mode the library can report. The C API maps these
// 1:1 onto ritree_status values, so the numbering here is part of the ABI.
enum class Errc : int {
    ok = 0,
    io = 1,
    parse = 2,
    format = 3,
    config = 4,
    zero_vector = 5,
    dimension_mismatch = 6,
    empty_input = 7,
    duplicate_doc_id = 8,
    unknown_doc_id = 9,
    invalid_stats = 10,
    too_few_points = 11,
    empty_node = 12,
    bad_level = 13,
    too_few_clusters = 14,
    degenerate_sample = 15,
    missing_label = 16,
    not_unit = 17,
    empty_table = 18,
    internal = 19,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::ok: return "ok";
        case Errc::io: return "io";
        case Errc::parse: return "parse";
        case Errc::format: return "format";
        case Errc::config: return "config";
        case Errc::zero_vector: return "zero_vector";
        case Errc::dimension_mismatch: return "dimension_mismatch";
        case Errc::empty_input: return "empty_input";
        case Errc::duplicate_doc_id: return "duplicate_doc_id";
        case Errc::unknown_doc_id: return "unknown_doc_id";
        case Errc::invalid_stats: return "invalid_stats";
        case Errc::too_few_points: return "too_few_points";
        case Errc::empty_node: return "empty_node";
        case Errc::bad_level: return "bad_level";
        case Errc::too_few_clusters: return "too_few_clusters";
        case Errc::degenerate_sample: return "degenerate_sample";
        case Errc::missing_label: return "missing_label";
        case Errc::not_unit: return "not_unit";
        case Errc::empty_table: return "empty_table";
        case Errc::internal: return "internal";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, std::string message) {
    throw Error(code, std::move(message));
}

}  // namespace ritree
