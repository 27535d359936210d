#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "aps/error.hpp"
#include "aps/pca.hpp"

namespace aps {

inline constexpr int difficulty_levels = 5;

struct DifficultyAssignment {
    std::string dataset_id;
    double score = 0.0; // in [0, 1], higher is harder
    int level = 1;      // 1 (easiest) .. 5 (hardest)
};

namespace detail {

inline double covariance_sign(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
    return s;
}

inline std::vector<double> min_max(const std::vector<double>& x) {
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    std::vector<double> out(x.size(), 0.5);
    if (*hi > *lo)
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - *lo) / (*hi - *lo);
    return out;
}

} // namespace detail

/// Assigns `n` ranked items to levels 1..5 in contiguous groups whose sizes
/// differ by at most one; the remainder goes to the lowest levels.
inline std::vector<int> quintile_levels(std::size_t n) {
    std::vector<int> levels(n);
    const std::size_t base = n / difficulty_levels, extra = n % difficulty_levels;
    std::size_t pos = 0;
    for (int lvl = 1; lvl <= difficulty_levels; ++lvl) {
        const std::size_t size = base + (static_cast<std::size_t>(lvl) <= extra ? 1 : 0);
        for (std::size_t i = 0; i < size; ++i) levels[pos++] = lvl;
    }
    return levels;
}

/// Difficulty from PCA coordinates. Each coordinate column is oriented so it
/// does not correlate positively with mean raw performance, min-max
/// normalized, and averaged. Levels are rank-based quintiles over
/// (score, dataset_id).
inline std::vector<DifficultyAssignment> difficulty(const Projection& p) {
    const std::size_t n = p.dataset_ids.size();
    if (n < static_cast<std::size_t>(difficulty_levels))
        fail(errc::too_few_datasets, fmt::format("difficulty needs at least {} datasets, have {}", difficulty_levels, n));

    std::array<std::vector<double>, 2> normalized;
    for (std::size_t c = 0; c < 2; ++c) {
        std::vector<double> column(n);
        for (std::size_t d = 0; d < n; ++d) column[d] = p.coords[d][c];
        if (p.mean_performance.size() == n && detail::covariance_sign(column, p.mean_performance) > 0.0)
            for (double& x : column) x = -x;
        normalized[c] = detail::min_max(column);
    }

    std::vector<DifficultyAssignment> out(n);
    for (std::size_t d = 0; d < n; ++d)
        out[d] = {p.dataset_ids[d], (normalized[0][d] + normalized[1][d]) / 2.0, 0};

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (out[x].score != out[y].score) return out[x].score < out[y].score;
        return out[x].dataset_id < out[y].dataset_id;
    });
    const auto levels = quintile_levels(n);
    for (std::size_t r = 0; r < n; ++r) out[order[r]].level = levels[r];
    return out;
}

} // namespace aps
