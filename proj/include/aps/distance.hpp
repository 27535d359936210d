#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "aps/error.hpp"
#include "aps/pca.hpp"
#include "aps/results.hpp"

namespace aps {

enum class DistanceSpace { FullAPS, PCA2D };

inline std::optional<DistanceSpace> parse_distance_space(std::string_view s) {
    if (s == "full") return DistanceSpace::FullAPS;
    if (s == "pca") return DistanceSpace::PCA2D;
    return std::nullopt;
}

inline std::string_view to_string(DistanceSpace s) { return s == DistanceSpace::FullAPS ? "full" : "pca"; }

struct DistanceMatrix {
    std::vector<std::string> dataset_ids;
    std::vector<double> dist; // row-major D x D

    std::size_t size() const { return dataset_ids.size(); }
    double operator()(std::size_t i, std::size_t j) const { return dist[i * size() + j]; }
};

/// Pairwise Euclidean distances between equally sized point vectors.
inline DistanceMatrix euclidean_distances(std::vector<std::string> ids, const std::vector<std::vector<double>>& points) {
    const std::size_t n = ids.size();
    DistanceMatrix dm{std::move(ids), std::vector<double>(n * n, 0.0)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t a = 0; a < points[i].size(); ++a) {
                const double diff = points[i][a] - points[j][a];
                s += diff * diff;
            }
            dm.dist[i * n + j] = dm.dist[j * n + i] = std::sqrt(s);
        }
    return dm;
}

inline DistanceMatrix distances(const Projection& p) {
    std::vector<std::vector<double>> points;
    for (const auto& c : p.coords) points.push_back({c[0], c[1]});
    return euclidean_distances(p.dataset_ids, points);
}

inline DistanceMatrix distances(const PerformanceMatrix& input, DistanceSpace space,
                                MissingPolicy policy = MissingPolicy::DropDataset) {
    if (space == DistanceSpace::PCA2D) return distances(pca_project(input, policy));
    const PerformanceMatrix m = input.complete() ? input : apply_missing_policy(input, policy);
    std::vector<std::vector<double>> points(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t d = 0; d < m.rows(); ++d)
        for (std::size_t a = 0; a < m.cols(); ++a) points[d][a] = m.value(d, a);
    return euclidean_distances(m.dataset_ids(), points);
}

/// Greedy farthest-point selection of `m` datasets, in selection order.
/// m = 1 yields the minimax center; otherwise the farthest pair seeds the set
/// and each step adds the dataset farthest from its nearest chosen one. Ties
/// resolve to the lexicographically smallest id (pair).
inline std::vector<std::string> select_diverse(const DistanceMatrix& dm, std::size_t m) {
    const std::size_t n = dm.size();
    if (m < 1 || m > n) fail(errc::invalid_m, fmt::format("m must be in [1, {}], got {}", n, m));

    // Visit datasets in id order so that first-found wins every tie.
    std::vector<std::size_t> by_id(n);
    std::iota(by_id.begin(), by_id.end(), 0);
    std::sort(by_id.begin(), by_id.end(), [&](std::size_t x, std::size_t y) { return dm.dataset_ids[x] < dm.dataset_ids[y]; });

    if (m == 1) {
        std::size_t best = by_id[0];
        double best_ecc = std::numeric_limits<double>::infinity();
        for (std::size_t i : by_id) {
            double ecc = 0.0;
            for (std::size_t j = 0; j < n; ++j) ecc = std::max(ecc, dm(i, j));
            if (ecc < best_ecc) {
                best_ecc = ecc;
                best = i;
            }
        }
        return {dm.dataset_ids[best]};
    }

    std::size_t first = by_id[0], second = by_id[1];
    double far = -1.0;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y)
            if (dm(by_id[x], by_id[y]) > far) {
                far = dm(by_id[x], by_id[y]);
                first = by_id[x];
                second = by_id[y];
            }

    std::vector<std::size_t> chosen{first, second};
    std::vector<bool> taken(n, false);
    taken[first] = taken[second] = true;
    std::vector<double> nearest(n);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(dm(i, first), dm(i, second));

    while (chosen.size() < m) {
        std::size_t pick = n;
        for (std::size_t i : by_id)
            if (!taken[i] && (pick == n || nearest[i] > nearest[pick])) pick = i;
        chosen.push_back(pick);
        taken[pick] = true;
        for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], dm(i, pick));
    }

    std::vector<std::string> out;
    for (auto i : chosen) out.push_back(dm.dataset_ids[i]);
    return out;
}

} // namespace aps
