#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "aps/error.hpp"
#include "aps/types.hpp"

namespace aps {

struct QuadrantConfig {
    double low_q = 0.25;
    double high_q = 0.75;

    void validate() const {
        if (!(low_q > 0.0 && low_q < 1.0 && high_q > 0.0 && high_q < 1.0 && low_q < high_q))
            fail(errc::invalid_argument, "quantiles must satisfy 0 < low_q < high_q < 1");
    }
};

enum class QuadrantClass { BothWeak, BothStrong, ASuperior, BSuperior, Moderate };

inline std::string_view to_string(QuadrantClass c) {
    switch (c) {
    case QuadrantClass::BothWeak: return "both_weak";
    case QuadrantClass::BothStrong: return "both_strong";
    case QuadrantClass::ASuperior: return "a_superior";
    case QuadrantClass::BSuperior: return "b_superior";
    case QuadrantClass::Moderate: return "moderate";
    }
    return "";
}

inline std::optional<QuadrantClass> parse_quadrant_class(std::string_view s) {
    for (auto c : {QuadrantClass::BothWeak, QuadrantClass::BothStrong, QuadrantClass::ASuperior,
                   QuadrantClass::BSuperior, QuadrantClass::Moderate})
        if (to_string(c) == s) return c;
    return std::nullopt;
}

struct ComparisonPoint {
    std::string dataset_id;
    double x = 0.0; // algorithm A
    double y = 0.0; // algorithm B
    QuadrantClass cls = QuadrantClass::Moderate;
};

struct ComparisonThresholds {
    double low_a = 0.0, high_a = 0.0, low_b = 0.0, high_b = 0.0;
};

struct ComparisonResult {
    MetricSpec spec;
    std::string algo_a, algo_b;
    std::vector<ComparisonPoint> points;
    ComparisonThresholds thresholds;
    std::vector<std::string> excluded; // datasets missing either score
};

/// Nearest-rank percentile: the element at 1-based rank ceil(q * n) of the
/// ascending sort.
inline double nearest_rank(std::vector<double> values, double q) {
    if (values.empty()) fail(errc::invalid_argument, "percentile of empty sample");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    // Absorb rounding noise such as 0.1 * 30 = 3.0000000000000004.
    auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

namespace detail {
enum class Band { Low, Mid, High };

inline Band band(double v, double low, double high) {
    if (v <= low) return Band::Low;
    if (v >= high) return Band::High;
    return Band::Mid;
}

inline QuadrantClass classify_bands(Band x, Band y) {
    if (x == Band::Low && y == Band::Low) return QuadrantClass::BothWeak;
    if (x == Band::High && y == Band::High) return QuadrantClass::BothStrong;
    if (x == Band::High && y == Band::Low) return QuadrantClass::ASuperior;
    if (x == Band::Low && y == Band::High) return QuadrantClass::BSuperior;
    return QuadrantClass::Moderate;
}
} // namespace detail

/// Classifies every dataset scored by both algorithms into one of five regions
/// using per-algorithm nearest-rank thresholds (inclusive).
inline ComparisonResult classify(const PerformanceMatrix& m, const std::string& algo_a, const std::string& algo_b,
                                 const QuadrantConfig& cfg = {}) {
    cfg.validate();
    const auto ia = m.algorithm_index(algo_a);
    if (!ia) fail(errc::unknown_algorithm, fmt::format("unknown algorithm '{}'", algo_a));
    const auto ib = m.algorithm_index(algo_b);
    if (!ib) fail(errc::unknown_algorithm, fmt::format("unknown algorithm '{}'", algo_b));

    ComparisonResult res{m.spec(), algo_a, algo_b, {}, {}, {}};
    std::vector<double> xs, ys;
    for (std::size_t d = 0; d < m.rows(); ++d) {
        if (!m.present(d, *ia) || !m.present(d, *ib)) {
            res.excluded.push_back(m.dataset_ids()[d]);
            continue;
        }
        res.points.push_back({m.dataset_ids()[d], m.value(d, *ia), m.value(d, *ib), QuadrantClass::Moderate});
        xs.push_back(m.value(d, *ia));
        ys.push_back(m.value(d, *ib));
    }
    if (res.points.size() < 4)
        fail(errc::too_few_datasets,
             fmt::format("comparison needs at least 4 datasets scored by both algorithms, have {}", res.points.size()));

    auto& t = res.thresholds;
    t.low_a = nearest_rank(xs, cfg.low_q);
    t.high_a = nearest_rank(xs, cfg.high_q);
    t.low_b = nearest_rank(ys, cfg.low_q);
    t.high_b = nearest_rank(ys, cfg.high_q);
    for (auto& p : res.points)
        p.cls = detail::classify_bands(detail::band(p.x, t.low_a, t.high_a), detail::band(p.y, t.low_b, t.high_b));
    return res;
}

} // namespace aps
