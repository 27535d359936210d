#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "aps/error.hpp"
#include "aps/results.hpp"
#include "aps/types.hpp"

namespace aps {

namespace linalg {

/// Row-major dense square matrix, just enough for covariance work.
struct SquareMatrix {
    std::size_t n = 0;
    std::vector<double> data;

    explicit SquareMatrix(std::size_t size = 0) : n(size), data(size * size, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

struct EigenPairs {
    std::vector<double> values;               // descending
    std::vector<std::vector<double>> vectors; // vectors[i] pairs with values[i]
};

/// Cyclic Jacobi eigensolver for symmetric matrices.
inline EigenPairs symmetric_eigen(SquareMatrix a, int max_sweeps = 100) {
    const std::size_t n = a.n;
    SquareMatrix v(n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0, diag = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            diag += a(i, i) * a(i, i);
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        }
        if (off == 0.0 || off <= 1e-32 * diag) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    EigenPairs out;
    for (std::size_t idx : order) {
        out.values.push_back(a(idx, idx));
        std::vector<double> vec(n);
        for (std::size_t k = 0; k < n; ++k) vec[k] = v(k, idx);
        out.vectors.push_back(std::move(vec));
    }
    return out;
}

/// Flips `axis` so that its largest-magnitude entry is positive; ties go to
/// the lowest index.
inline void orient_axis(std::vector<double>& axis) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < axis.size(); ++i)
        if (std::abs(axis[i]) > std::abs(axis[best])) best = i;
    if (axis[best] < 0)
        for (double& x : axis) x = -x;
}

} // namespace linalg

/// Two-dimensional PCA embedding of datasets in algorithm-performance space.
struct Projection {
    MetricSpec spec;
    std::vector<std::string> dataset_ids;
    std::vector<std::string> algorithm_ids;
    std::vector<std::array<double, 2>> coords;     // per dataset: (C1, C2)
    std::array<std::vector<double>, 2> loadings;   // unit principal axes over algorithms
    std::array<double, 2> explained_variance_ratio{0.0, 0.0};
    std::vector<double> column_means;
    std::vector<double> mean_performance;          // per dataset, over algorithms
};

/// Projects the (completed) matrix onto its top two principal axes. Columns are
/// mean-centered but not scaled.
inline Projection pca_project(const PerformanceMatrix& input, MissingPolicy policy = MissingPolicy::DropDataset) {
    const PerformanceMatrix m = input.complete() ? input : apply_missing_policy(input, policy);
    const std::size_t d_count = m.rows(), a_count = m.cols();
    if (d_count < 3) fail(errc::too_few_datasets, fmt::format("need at least 3 complete datasets, have {}", d_count));
    if (a_count < 2) fail(errc::too_few_algorithms, fmt::format("need at least 2 algorithms, have {}", a_count));

    Projection p;
    p.spec = m.spec();
    p.dataset_ids = m.dataset_ids();
    p.algorithm_ids = m.algorithm_ids();
    p.column_means.assign(a_count, 0.0);
    p.mean_performance.assign(d_count, 0.0);
    for (std::size_t d = 0; d < d_count; ++d)
        for (std::size_t a = 0; a < a_count; ++a) {
            p.column_means[a] += m.value(d, a);
            p.mean_performance[d] += m.value(d, a);
        }
    for (auto& mu : p.column_means) mu /= static_cast<double>(d_count);
    for (auto& mu : p.mean_performance) mu /= static_cast<double>(a_count);

    std::vector<double> centered(d_count * a_count);
    for (std::size_t d = 0; d < d_count; ++d)
        for (std::size_t a = 0; a < a_count; ++a) centered[d * a_count + a] = m.value(d, a) - p.column_means[a];

    linalg::SquareMatrix cov(a_count);
    for (std::size_t i = 0; i < a_count; ++i)
        for (std::size_t j = i; j < a_count; ++j) {
            double s = 0.0;
            for (std::size_t d = 0; d < d_count; ++d) s += centered[d * a_count + i] * centered[d * a_count + j];
            cov(i, j) = cov(j, i) = s / static_cast<double>(d_count - 1);
        }

    double total = 0.0;
    for (std::size_t i = 0; i < a_count; ++i) total += cov(i, i);
    if (!(total > 0.0)) fail(errc::degenerate_variance, "performance matrix has zero total variance");

    auto eig = linalg::symmetric_eigen(cov);
    for (std::size_t c = 0; c < 2; ++c) {
        auto axis = eig.vectors[c];
        linalg::orient_axis(axis);
        p.loadings[c] = std::move(axis);
        p.explained_variance_ratio[c] = std::clamp(eig.values[c] / total, 0.0, 1.0);
    }

    p.coords.resize(d_count);
    for (std::size_t d = 0; d < d_count; ++d)
        for (std::size_t c = 0; c < 2; ++c) {
            double s = 0.0;
            for (std::size_t a = 0; a < a_count; ++a) s += centered[d * a_count + a] * p.loadings[c][a];
            p.coords[d][c] = s;
        }
    return p;
}

} // namespace aps
