#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "aps/pca.hpp"
#include "oracles.hpp"

using namespace aps;

namespace {

PerformanceMatrix dense(const oracle::Rows& rows) {
    return PerformanceMatrix::dense({}, oracle::ids(rows.size()), oracle::ids(rows[0].size(), "a"), rows);
}

std::string code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

} // namespace

TEST(Pca, CollinearRowsGiveSingleComponent) {
    auto p = pca_project(dense({{0, 0}, {1, 1}, {2, 2}}));
    EXPECT_NEAR(p.coords[0][0], -std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(p.coords[1][0], 0.0, 1e-12);
    EXPECT_NEAR(p.coords[2][0], std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(p.explained_variance_ratio[0], 1.0, 1e-12);
    EXPECT_NEAR(p.explained_variance_ratio[1], 0.0, 1e-12);
    EXPECT_NEAR(p.loadings[0][0], 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(p.loadings[0][1], 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Pca, MatchesEigenOracleOnRandomMatrix) {
    std::mt19937_64 rng(3);
    const auto rows = oracle::random_matrix(rng, 10, 6);
    const auto p = pca_project(dense(rows));
    const auto ref = oracle::pca(rows);
    for (std::size_t d = 0; d < rows.size(); ++d)
        for (int c = 0; c < 2; ++c) EXPECT_NEAR(p.coords[d][c], ref.coords[d][c], 1e-9);
    for (int c = 0; c < 2; ++c) EXPECT_NEAR(p.explained_variance_ratio[c], ref.ratio[c], 1e-9);
}

TEST(Pca, ProjectionInvariants) {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 40; ++t) {
        const std::size_t d = 3 + rng() % 18, a = 2 + rng() % 9;
        const auto p = pca_project(dense(oracle::random_matrix(rng, d, a)));
        for (int c = 0; c < 2; ++c) {
            double norm = 0.0, mean = 0.0;
            for (double x : p.loadings[c]) norm += x * x;
            for (const auto& xy : p.coords) mean += xy[c];
            EXPECT_NEAR(std::sqrt(norm), 1.0, 1e-9);
            EXPECT_NEAR(mean / static_cast<double>(d), 0.0, 1e-9);
            // Largest-magnitude entry is positive.
            auto it = std::max_element(p.loadings[c].begin(), p.loadings[c].end(),
                                       [](double x, double y) { return std::abs(x) < std::abs(y); });
            EXPECT_GT(*it, 0.0);
        }
        EXPECT_NEAR(std::inner_product(p.loadings[0].begin(), p.loadings[0].end(), p.loadings[1].begin(), 0.0), 0.0,
                    1e-9);
        EXPECT_GE(p.explained_variance_ratio[0], p.explained_variance_ratio[1]);
        EXPECT_GE(p.explained_variance_ratio[1], 0.0);
        EXPECT_LE(p.explained_variance_ratio[0] + p.explained_variance_ratio[1], 1.0 + 1e-9);
    }
}

TEST(Pca, FullEigenbasisReconstructsCenteredMatrix) {
    std::mt19937_64 rng(23);
    const auto rows = oracle::random_matrix(rng, 9, 5);
    linalg::SquareMatrix cov(5);
    const auto ref = oracle::pca(rows);
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = 0; j < 5; ++j) cov(i, j) = (ref.centered.transpose() * ref.centered)(i, j) / 8.0;
    const auto eig = linalg::symmetric_eigen(cov);
    Eigen::MatrixXd basis(5, 5);
    for (int c = 0; c < 5; ++c)
        for (int j = 0; j < 5; ++j) basis(j, c) = eig.vectors[c][j];
    const Eigen::MatrixXd recon = ref.centered * basis * basis.transpose();
    EXPECT_LT((recon - ref.centered).cwiseAbs().maxCoeff(), 1e-9);
    for (int c = 0; c < 5; ++c) EXPECT_NEAR(eig.values[c], ref.eigenvalues(c), 1e-9);
}

TEST(Pca, TopTwoIsBestRankTwoAmongRandomBases) {
    std::mt19937_64 rng(29);
    const auto rows = oracle::random_matrix(rng, 12, 6);
    const auto p = pca_project(dense(rows));
    const auto ref = oracle::pca(rows);
    Eigen::MatrixXd w(6, 2);
    for (int c = 0; c < 2; ++c)
        for (int j = 0; j < 6; ++j) w(j, c) = p.loadings[c][j];
    const double best = (ref.centered - ref.centered * w * w.transpose()).norm();
    std::normal_distribution<double> g;
    for (int t = 0; t < 200; ++t) {
        Eigen::MatrixXd r(6, 2);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 2; ++j) r(i, j) = g(rng);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(r);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(6, 2);
        EXPECT_LE(best, (ref.centered - ref.centered * q * q.transpose()).norm() + 1e-12);
    }
}

TEST(Pca, RowPermutationPermutesCoordinates) {
    std::mt19937_64 rng(31);
    auto rows = oracle::random_matrix(rng, 8, 4);
    const auto p = pca_project(dense(rows));
    std::vector<std::size_t> perm(8);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    oracle::Rows shuffled;
    std::vector<std::string> names;
    const auto base_ids = oracle::ids(8);
    for (auto i : perm) {
        shuffled.push_back(rows[i]);
        names.push_back(base_ids[i]);
    }
    const auto q = pca_project(PerformanceMatrix::dense({}, names, oracle::ids(4, "a"), shuffled));
    for (std::size_t k = 0; k < 8; ++k)
        for (int c = 0; c < 2; ++c) EXPECT_NEAR(q.coords[k][c], p.coords[perm[k]][c], 1e-9);
}

TEST(Pca, Preconditions) {
    EXPECT_EQ(code_of([] { pca_project(dense({{0, 1}, {1, 0}})); }), "too_few_datasets");
    EXPECT_EQ(code_of([] { pca_project(dense({{0}, {1}, {2}})); }), "too_few_algorithms");
    EXPECT_EQ(code_of([] { pca_project(dense({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}})); }), "degenerate_variance");
}

TEST(Pca, MissingPolicyApplied) {
    PerformanceMatrix m({}, {"a", "b", "c", "d"}, {"X", "Y", "Z"});
    const double v[4][3] = {{0.1, 0.2, 0.3}, {0.4, 0.1, 0.9}, {0.7, 0.5, 0.2}, {0.3, 0.8, 0.6}};
    for (int d = 0; d < 4; ++d)
        for (int a = 0; a < 3; ++a)
            if (!(d == 3 && a == 2)) m.set(d, a, v[d][a]);
    EXPECT_EQ(pca_project(m).dataset_ids.size(), 3u);
    EXPECT_EQ(pca_project(m, MissingPolicy::DropAlgorithm).algorithm_ids.size(), 2u);
    EXPECT_EQ(pca_project(m, MissingPolicy::FillZero).dataset_ids.size(), 4u);
}
