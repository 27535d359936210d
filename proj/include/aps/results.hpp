#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <fmt/format.h>

#include "aps/detail/text.hpp"
#include "aps/error.hpp"
#include "aps/types.hpp"

namespace aps {

inline constexpr std::string_view results_header = "dataset,algorithm,metric,k,fold,value";

enum class ResultsFormat { CSV };

/// Parses a results file. Errors carry the 1-based line number in the message.
inline ResultSet parse_results(std::string_view text, ResultsFormat = ResultsFormat::CSV) {
    auto lines = detail::split_lines(text);
    if (!lines.empty() && lines.front().substr(0, 3) == "\xEF\xBB\xBF") lines.front().remove_prefix(3);
    if (lines.empty() || lines.front() != results_header)
        fail(errc::malformed_row, fmt::format("line 1: expected header '{}'", results_header));

    std::vector<PerformanceRecord> records;
    std::set<std::tuple<std::string, std::string, MetricSpec, int>> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (lines[i].empty()) continue;
        auto fields = detail::split(lines[i], ',');
        if (fields.size() != 6)
            fail(errc::malformed_row, fmt::format("line {}: expected 6 columns, got {}", line_no, fields.size()));
        if (!detail::valid_id(fields[0]) || !detail::valid_id(fields[1]))
            fail(errc::malformed_row, fmt::format("line {}: invalid dataset or algorithm id", line_no));
        auto metric = parse_metric(fields[2]);
        if (!metric) fail(errc::unknown_metric, fmt::format("line {}: unknown metric '{}'", line_no, fields[2]));
        auto k = detail::parse_int(fields[3]);
        auto fold = detail::parse_int(fields[4]);
        auto value = detail::parse_double(fields[5]);
        if (!k || !fold || !value || *k < 1 || *fold < 1 || *k > 1'000'000'000 || *fold > 1'000'000'000)
            fail(errc::malformed_row, fmt::format("line {}: unparsable number", line_no));
        if (!(*value >= 0.0 && *value <= 1.0))
            fail(errc::value_out_of_range, fmt::format("line {}: value {} outside [0, 1]", line_no, fields[5]));

        PerformanceRecord rec{std::string(fields[0]), std::string(fields[1]),
                              MetricSpec(*metric, static_cast<int>(*k)), static_cast<int>(*fold), *value};
        if (!seen.emplace(rec.dataset_id, rec.algorithm_id, rec.spec, rec.fold).second)
            fail(errc::duplicate_key, fmt::format("line {}: duplicate (dataset, algorithm, metric, k, fold)", line_no));
        records.push_back(std::move(rec));
    }
    return ResultSet(std::move(records));
}

/// Writes records in their stored order; values use the shortest
/// representation that parses back to the same double.
inline std::string serialize_results(const ResultSet& rs) {
    std::string out(results_header);
    out += '\n';
    for (const auto& r : rs.records())
        out += fmt::format("{},{},{},{},{},{}\n", r.dataset_id, r.algorithm_id, to_string(r.spec.metric), r.spec.k,
                           r.fold, r.value);
    return out;
}

/// Concatenates result sets. Keys must stay unique across the inputs.
inline ResultSet merge_results(const std::vector<const ResultSet*>& sets) {
    std::vector<PerformanceRecord> all;
    std::set<std::tuple<std::string, std::string, MetricSpec, int>> seen;
    for (const auto* rs : sets)
        for (const auto& r : rs->records()) {
            if (!seen.emplace(r.dataset_id, r.algorithm_id, r.spec, r.fold).second)
                fail(errc::duplicate_key, fmt::format("record ({}, {}, {}, fold {}) occurs in more than one result set",
                                                      r.dataset_id, r.algorithm_id, to_string(r.spec), r.fold));
            all.push_back(r);
        }
    return ResultSet(std::move(all));
}

/// Fold-averaged matrix for one spec, labels in lexicographic order.
inline PerformanceMatrix build_matrix(const ResultSet& rs, const MetricSpec& spec) {
    struct Acc {
        double sum = 0.0;
        int n = 0;
    };
    std::map<std::pair<std::string, std::string>, Acc> cells;
    std::set<std::string> datasets, algorithms;
    for (const auto& r : rs.records()) {
        if (r.spec != spec) continue;
        auto& acc = cells[{r.dataset_id, r.algorithm_id}];
        acc.sum += r.value;
        ++acc.n;
        datasets.insert(r.dataset_id);
        algorithms.insert(r.algorithm_id);
    }
    if (cells.empty()) fail(errc::no_records_for_spec, fmt::format("no records for {}", to_string(spec)));

    PerformanceMatrix m(spec, {datasets.begin(), datasets.end()}, {algorithms.begin(), algorithms.end()});
    for (const auto& [key, acc] : cells)
        m.set(*m.dataset_index(key.first), *m.algorithm_index(key.second), acc.sum / acc.n);
    return m;
}

enum class MissingPolicy { DropDataset, DropAlgorithm, FillZero };

inline std::optional<MissingPolicy> parse_missing_policy(std::string_view s) {
    if (s == "drop-dataset" || s == "DropDataset") return MissingPolicy::DropDataset;
    if (s == "drop-algorithm" || s == "DropAlgorithm") return MissingPolicy::DropAlgorithm;
    if (s == "fill-zero" || s == "FillZero") return MissingPolicy::FillZero;
    return std::nullopt;
}

/// Returns a complete matrix according to `policy`.
inline PerformanceMatrix apply_missing_policy(const PerformanceMatrix& m, MissingPolicy policy) {
    std::vector<std::size_t> keep_rows, keep_cols;
    for (std::size_t d = 0; d < m.rows(); ++d) {
        bool full = true;
        for (std::size_t a = 0; a < m.cols(); ++a) full = full && m.present(d, a);
        if (full || policy != MissingPolicy::DropDataset) keep_rows.push_back(d);
    }
    for (std::size_t a = 0; a < m.cols(); ++a) {
        bool full = true;
        for (std::size_t d = 0; d < m.rows(); ++d) full = full && m.present(d, a);
        if (full || policy != MissingPolicy::DropAlgorithm) keep_cols.push_back(a);
    }

    std::vector<std::string> ds, as;
    for (auto d : keep_rows) ds.push_back(m.dataset_ids()[d]);
    for (auto a : keep_cols) as.push_back(m.algorithm_ids()[a]);
    PerformanceMatrix out(m.spec(), std::move(ds), std::move(as));
    for (std::size_t i = 0; i < keep_rows.size(); ++i)
        for (std::size_t j = 0; j < keep_cols.size(); ++j) {
            const auto d = keep_rows[i], a = keep_cols[j];
            out.set(i, j, m.present(d, a) ? m.value(d, a) : 0.0);
        }
    return out;
}

/// Restricts the algorithm axes to `algorithms` (kept in lexicographic order).
inline PerformanceMatrix select_algorithms(const PerformanceMatrix& m, const std::vector<std::string>& algorithms) {
    std::set<std::string> wanted(algorithms.begin(), algorithms.end());
    std::vector<std::size_t> cols;
    for (const auto& id : wanted) {
        auto idx = m.algorithm_index(id);
        if (!idx) fail(errc::unknown_algorithm, fmt::format("unknown algorithm '{}'", id));
        cols.push_back(*idx);
    }
    std::sort(cols.begin(), cols.end());
    std::vector<std::string> as;
    for (auto a : cols) as.push_back(m.algorithm_ids()[a]);
    PerformanceMatrix out(m.spec(), m.dataset_ids(), std::move(as));
    for (std::size_t d = 0; d < m.rows(); ++d)
        for (std::size_t j = 0; j < cols.size(); ++j)
            if (m.present(d, cols[j])) out.set(d, j, m.value(d, cols[j]));
    return out;
}

} // namespace aps
