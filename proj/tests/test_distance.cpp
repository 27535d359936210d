#include <random>

#include <gtest/gtest.h>

#include "aps/distance.hpp"
#include "oracles.hpp"

using namespace aps;

namespace {

PerformanceMatrix dense(const oracle::Rows& rows) {
    return PerformanceMatrix::dense({}, oracle::ids(rows.size()), oracle::ids(rows[0].size(), "a"), rows);
}

} // namespace

TEST(Distances, IdenticalRowsAndThreeFourFive) {
    auto dm = distances(dense({{0.2, 0.2}, {0.2, 0.2}}), DistanceSpace::FullAPS);
    EXPECT_EQ(dm(0, 1), 0.0);
    auto tri = euclidean_distances({"p", "q"}, {{0, 0}, {3, 4}});
    EXPECT_DOUBLE_EQ(tri(0, 1), 5.0);
    EXPECT_DOUBLE_EQ(tri(1, 0), 5.0);
}

TEST(Distances, MatchDoubleLoopOracle) {
    std::mt19937_64 rng(8);
    const auto rows = oracle::random_matrix(rng, 8, 5);
    const auto dm = distances(dense(rows), DistanceSpace::FullAPS);
    const auto ref = oracle::pairwise(rows);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) EXPECT_NEAR(dm(i, j), ref[i][j], 1e-12);
}

TEST(Distances, Pca2DUsesProjectedCoordinates) {
    std::mt19937_64 rng(9);
    const auto rows = oracle::random_matrix(rng, 7, 4);
    const auto dm = distances(dense(rows), DistanceSpace::PCA2D);
    const auto ref = oracle::pca(rows);
    oracle::Rows pts;
    for (const auto& c : ref.coords) pts.push_back({c[0], c[1]});
    const auto expected = oracle::pairwise(pts);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 7; ++j) EXPECT_NEAR(dm(i, j), expected[i][j], 1e-9);
}

TEST(Distances, MetricAxioms) {
    std::mt19937_64 rng(10);
    for (int t = 0; t < 30; ++t) {
        const auto dm = distances(dense(oracle::random_matrix(rng, 3 + rng() % 10, 2 + rng() % 6)), DistanceSpace::FullAPS);
        const auto n = dm.size();
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_EQ(dm(i, i), 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                EXPECT_GE(dm(i, j), 0.0);
                EXPECT_EQ(dm(i, j), dm(j, i));
                for (std::size_t k = 0; k < n; ++k) EXPECT_LE(dm(i, k), dm(i, j) + dm(j, k) + 1e-9);
            }
        }
    }
}

TEST(SelectDiverse, LineEndpoints) {
    std::vector<std::string> names;
    oracle::Rows pts;
    for (int i = 0; i <= 10; ++i) {
        names.push_back("p" + std::to_string(100 + i));
        pts.push_back({static_cast<double>(i)});
    }
    const auto dm = euclidean_distances(names, pts);
    EXPECT_EQ(select_diverse(dm, 2), (std::vector<std::string>{"p100", "p110"}));
    // Next pick is the midpoint, the center is also the midpoint.
    EXPECT_EQ(select_diverse(dm, 3).back(), "p105");
    EXPECT_EQ(select_diverse(dm, 1), std::vector<std::string>{"p105"});
    EXPECT_EQ(select_diverse(dm, 11).size(), 11u);
}

TEST(SelectDiverse, TiesResolveToLowestIds) {
    // Square: both diagonals have equal length.
    const auto dm = euclidean_distances({"d", "c", "b", "a"}, {{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    // Diagonals: d-b and c-a; lexicographically smaller pair is (a, c).
    EXPECT_EQ(select_diverse(dm, 2), (std::vector<std::string>{"a", "c"}));
    EXPECT_EQ(select_diverse(dm, 3)[2], "b");
}

TEST(SelectDiverse, MatchesGreedyOracleAndMinDistanceShrinks) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 50; ++t) {
        const auto pts = oracle::random_matrix(rng, 10, 2);
        const auto names = oracle::ids(10);
        const auto dm = euclidean_distances(names, pts);
        const auto ref = oracle::pairwise(pts);
        for (std::size_t m = 1; m <= 10; ++m) ASSERT_EQ(select_diverse(dm, m), oracle::greedy_select(names, ref, m));

        double prev = INFINITY;
        for (std::size_t m = 2; m <= 10; ++m) {
            const auto sel = select_diverse(dm, m);
            double min_d = INFINITY;
            for (std::size_t i = 0; i < sel.size(); ++i)
                for (std::size_t j = i + 1; j < sel.size(); ++j)
                    min_d = std::min(min_d, ref[std::stoul(sel[i].substr(1))][std::stoul(sel[j].substr(1))]);
            EXPECT_LE(min_d, prev);
            prev = min_d;
        }
    }
}

TEST(SelectDiverse, InvalidM) {
    const auto dm = euclidean_distances({"a", "b"}, {{0}, {1}});
    EXPECT_THROW(select_diverse(dm, 0), Error);
    EXPECT_THROW(select_diverse(dm, 3), Error);
}
