#include "ritree/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "ritree/rng.hpp"

namespace ritree {

EncodedMatrix encode_pipeline(const Corpus& corpus, const EncodeOptions& opts) {
    if (opts.reduce == Reduce::cull && opts.repr != Repr::bm25)
        fail(Errc::config, "culling is defined on the bm25 term space only");
    const FullSpaceDocs full = build_full_space(corpus, opts.repr);
    return reduce_and_unitize(full, opts.reduce, opts.dims, opts.seed_len,
                              rng::derive(opts.rng_seed, "ri"));
}

KTree build_tree(const EncodedMatrix& matrix, const BuildOptions& opts) {
    KTree tree({opts.order, opts.variant, rng::derive(opts.rng_seed, "ktree")});
    std::vector<std::size_t> order(matrix.rows.size());
    std::iota(order.begin(), order.end(), 0);
    if (opts.shuffle) {
        auto rng = rng::engine(rng::derive(opts.rng_seed, "shuffle"));
        std::shuffle(order.begin(), order.end(), rng);
    }
    for (auto i : order) tree.insert(matrix.rows[i], matrix.doc_ids[i]);
    return tree;
}

void save_assignments(const KTree& tree, std::ostream& out) {
    for (const auto& [doc_id, cluster] : tree.assignments())
        out << doc_id << '\t' << cluster << '\n';
}

void save_report(const ExperimentReport& report, std::ostream& out) {
    out << "config\tdims\talpha\tbeta\tgamma\tdelta\truns\n";
    char buf[128];
    for (const auto& row : report.rows) {
        std::snprintf(buf, sizeof(buf), "%s\t%zu\t%.4f\t%.4f\t%.4f\t%.4f\t%zu\n",
                      row.config_id.c_str(), row.dims, row.alpha, row.beta, row.gamma,
                      row.delta, row.runs);
        out << buf;
    }
}

namespace {

void write_double(std::ostream& out, double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    out.write(buf, ptr - buf);
}

double parse_double(std::string_view text, std::size_t line_no) {
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (ec != std::errc() || ptr != text.data() + text.size())
        fail(Errc::parse, "runs csv line " + std::to_string(line_no) + ": bad number '" +
                              std::string(text) + "'");
    return x;
}

}  // namespace

void save_runs_csv(const ExperimentReport& report, std::ostream& out) {
    out << "config,dims,tree_run,reduce_run,entropy,purity\n";
    for (const auto& m : report.measurements) {
        out << m.config_id << ',' << m.dims << ',' << m.tree_run << ',' << m.reduce_run
            << ',';
        write_double(out, m.entropy);
        out << ',';
        write_double(out, m.purity);
        out << '\n';
    }
}

std::vector<RunMeasurement> load_runs_csv(std::istream& in) {
    std::vector<RunMeasurement> out;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (line != "config,dims,tree_run,reduce_run,entropy,purity")
                fail(Errc::format, "runs csv: unexpected header '" + line + "'");
            continue;
        }
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            const auto comma = line.find(',', pos);
            fields.push_back(line.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (fields.size() != 6)
            fail(Errc::parse, "runs csv line " + std::to_string(line_no) +
                                  ": expected 6 fields, got " +
                                  std::to_string(fields.size()));
        RunMeasurement m;
        m.config_id = fields[0];
        m.dims = static_cast<std::size_t>(parse_double(fields[1], line_no));
        m.tree_run = static_cast<std::size_t>(parse_double(fields[2], line_no));
        m.reduce_run = static_cast<std::size_t>(parse_double(fields[3], line_no));
        m.entropy = parse_double(fields[4], line_no);
        m.purity = parse_double(fields[5], line_no);
        out.push_back(std::move(m));
    }
    if (!header_seen) fail(Errc::format, "runs csv: empty file");
    return out;
}

std::vector<RunMeasurement> load_runs_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open " + path);
    return load_runs_csv(in);
}

std::vector<CompareRow> compare_runs(const std::vector<RunMeasurement>& a,
                                     const std::vector<RunMeasurement>& b) {
    auto group = [](const std::vector<RunMeasurement>& ms) {
        std::map<std::size_t, std::vector<double>> by_dims;
        for (const auto& m : ms) by_dims[m.dims].push_back(m.purity);
        return by_dims;
    };
    const auto ga = group(a);
    const auto gb = group(b);
    if (ga.size() != gb.size() ||
        !std::equal(ga.begin(), ga.end(), gb.begin(),
                    [](const auto& x, const auto& y) { return x.first == y.first; }))
        fail(Errc::dimension_mismatch, "compare: reports cover different dimension sets");

    std::vector<CompareRow> rows;
    for (const auto& [dims, sample_a] : ga) {
        const auto& sample_b = gb.at(dims);
        CompareRow row;
        row.dims = dims;
        row.mean_a = std::accumulate(sample_a.begin(), sample_a.end(), 0.0) /
                     static_cast<double>(sample_a.size());
        row.mean_b = std::accumulate(sample_b.begin(), sample_b.end(), 0.0) /
                     static_cast<double>(sample_b.size());
        if (sample_a == sample_b) {
            row.t = 0.0;
            row.p = 1.0;
        } else {
            const auto w = welch_t_test(sample_a, sample_b);
            row.t = w.t;
            row.p = w.p;
        }
        row.significant = row.p < 0.05;
        rows.push_back(row);
    }
    return rows;
}

void save_compare(const std::vector<CompareRow>& rows, std::ostream& out) {
    out << "dims\tmean_a\tmean_b\tt\tp\tsignificant\n";
    char buf[160];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%zu\t%.6f\t%.6f\t%.6g\t%.6g\t%s\n", row.dims,
                      row.mean_a, row.mean_b, row.t, row.p,
                      row.significant ? "yes" : "no");
        out << buf;
    }
}

void atomic_write_file(const std::string& path,
                       const std::function<void(std::ostream&)>& writer) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) fail(Errc::io, "cannot write " + tmp);
        writer(out);
        out.flush();
        if (!out) fail(Errc::io, "failed while writing " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(Errc::io, "cannot move " + tmp + " to " + path + ": " + ec.message());
}

}  // namespace ritree
