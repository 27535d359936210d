#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "aps/error.hpp"

namespace aps {

enum class Metric { NDCG, Recall, HitRate };

inline std::string_view to_string(Metric m) {
    switch (m) {
    case Metric::NDCG: return "nDCG";
    case Metric::Recall: return "Recall";
    case Metric::HitRate: return "HitRate";
    }
    return "";
}

inline std::optional<Metric> parse_metric(std::string_view name) {
    if (name == "nDCG") return Metric::NDCG;
    if (name == "Recall") return Metric::Recall;
    if (name == "HitRate") return Metric::HitRate;
    return std::nullopt;
}

/// A ranking metric evaluated at list length `k`.
struct MetricSpec {
    Metric metric = Metric::NDCG;
    int k = 10;

    MetricSpec() = default;
    MetricSpec(Metric m, int cutoff) : metric(m), k(cutoff) {
        if (cutoff < 1) fail(errc::invalid_argument, "k must be >= 1");
    }

    friend auto operator<=>(const MetricSpec&, const MetricSpec&) = default;
};

inline std::string to_string(const MetricSpec& s) {
    return std::string(to_string(s.metric)) + "@" + std::to_string(s.k);
}

struct PerformanceRecord {
    std::string dataset_id;
    std::string algorithm_id;
    MetricSpec spec;
    int fold = 1;
    double value = 0.0;

    auto key() const { return std::tie(dataset_id, algorithm_id, spec, fold); }

    friend bool operator==(const PerformanceRecord&, const PerformanceRecord&) = default;
    friend bool operator<(const PerformanceRecord& a, const PerformanceRecord& b) {
        return std::tie(a.dataset_id, a.algorithm_id, a.spec, a.fold, a.value) <
               std::tie(b.dataset_id, b.algorithm_id, b.spec, b.fold, b.value);
    }
};

/// Parsed evaluation results. Id sets always equal the ids occurring in `records`.
class ResultSet {
public:
    ResultSet() = default;
    explicit ResultSet(std::vector<PerformanceRecord> records) : records_(std::move(records)) {
        for (const auto& r : records_) {
            dataset_ids_.insert(r.dataset_id);
            algorithm_ids_.insert(r.algorithm_id);
        }
    }

    const std::vector<PerformanceRecord>& records() const { return records_; }
    const std::set<std::string>& dataset_ids() const { return dataset_ids_; }
    const std::set<std::string>& algorithm_ids() const { return algorithm_ids_; }
    bool empty() const { return records_.empty(); }
    std::size_t size() const { return records_.size(); }

private:
    std::vector<PerformanceRecord> records_;
    std::set<std::string> dataset_ids_;
    std::set<std::string> algorithm_ids_;
};

/// Datasets x algorithms grid of fold-averaged scores for one metric spec.
/// Cells without any record are flagged absent and hold 0.
class PerformanceMatrix {
public:
    PerformanceMatrix() = default;
    PerformanceMatrix(MetricSpec spec, std::vector<std::string> dataset_ids,
                      std::vector<std::string> algorithm_ids)
        : spec_(spec), dataset_ids_(std::move(dataset_ids)), algorithm_ids_(std::move(algorithm_ids)),
          values_(dataset_ids_.size() * algorithm_ids_.size(), 0.0),
          present_(dataset_ids_.size() * algorithm_ids_.size(), false) {
        check_unique(dataset_ids_, "dataset");
        check_unique(algorithm_ids_, "algorithm");
    }

    /// Complete matrix from dense rows.
    static PerformanceMatrix dense(MetricSpec spec, std::vector<std::string> dataset_ids,
                                   std::vector<std::string> algorithm_ids,
                                   const std::vector<std::vector<double>>& rows) {
        PerformanceMatrix m(spec, std::move(dataset_ids), std::move(algorithm_ids));
        if (rows.size() != m.rows()) fail(errc::invalid_argument, "row count mismatch");
        for (std::size_t d = 0; d < m.rows(); ++d) {
            if (rows[d].size() != m.cols()) fail(errc::invalid_argument, "column count mismatch");
            for (std::size_t a = 0; a < m.cols(); ++a) m.set(d, a, rows[d][a]);
        }
        return m;
    }

    const MetricSpec& spec() const { return spec_; }
    const std::vector<std::string>& dataset_ids() const { return dataset_ids_; }
    const std::vector<std::string>& algorithm_ids() const { return algorithm_ids_; }
    std::size_t rows() const { return dataset_ids_.size(); }
    std::size_t cols() const { return algorithm_ids_.size(); }

    double value(std::size_t d, std::size_t a) const { return values_[d * cols() + a]; }
    bool present(std::size_t d, std::size_t a) const { return present_[d * cols() + a]; }

    void set(std::size_t d, std::size_t a, double v) {
        values_[d * cols() + a] = v;
        present_[d * cols() + a] = true;
    }

    bool complete() const {
        return std::all_of(present_.begin(), present_.end(), [](bool p) { return p; });
    }

    std::optional<std::size_t> dataset_index(std::string_view id) const { return find(dataset_ids_, id); }
    std::optional<std::size_t> algorithm_index(std::string_view id) const { return find(algorithm_ids_, id); }

private:
    static std::optional<std::size_t> find(const std::vector<std::string>& ids, std::string_view id) {
        auto it = std::find(ids.begin(), ids.end(), id);
        if (it == ids.end()) return std::nullopt;
        return static_cast<std::size_t>(it - ids.begin());
    }

    static void check_unique(const std::vector<std::string>& ids, const char* what) {
        std::set<std::string_view> seen;
        for (const auto& id : ids)
            if (!seen.insert(id).second)
                fail(errc::invalid_argument, std::string("duplicate ") + what + " id '" + id + "'");
    }

    MetricSpec spec_;
    std::vector<std::string> dataset_ids_;
    std::vector<std::string> algorithm_ids_;
    std::vector<double> values_;
    std::vector<bool> present_;
};

} // namespace aps
