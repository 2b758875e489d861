#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gridwarp/errors.hpp"
#include "gridwarp/grid_match.hpp"
#include "gridwarp/oracles.hpp"
#include "gridwarp/random.hpp"

using namespace gridwarp;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform();
    }
    return m;
}

// Smooth surface with pairwise distinct columns.
Eigen::MatrixXd smooth_grid(int rows, int cols, double phase) {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) m(r, c) = std::sin(0.45 * r + 0.8 * c + phase) + 0.15 * c;
    }
    return m;
}

std::vector<double> identity_mapping(int q) {
    std::vector<double> v(static_cast<std::size_t>(q));
    for (int i = 0; i < q; ++i) v[static_cast<std::size_t>(i)] = i + 1;
    return v;
}

}  // namespace

TEST(ColumnDistanceMatrix, SelfDiagonalIsZero) {
    Rng rng(21);
    const auto a = random_matrix(rng, 6, 5);
    const auto d = column_distance_matrix(a, a);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(d(i, i), 0.0);
    EXPECT_TRUE((d.array() >= 0.0).all());
}

TEST(ColumnDistanceMatrix, SingleColumns) {
    Eigen::MatrixXd a(2, 1), b(2, 1);
    a << 0, 1;
    b << 0, 2;
    const auto d = column_distance_matrix(a, b);
    ASSERT_EQ(d.rows(), 1);
    ASSERT_EQ(d.cols(), 1);
    EXPECT_EQ(d(0, 0), 1.0);
}

TEST(ColumnDistanceMatrix, EntriesMatchBruteforce) {
    Rng rng(22);
    for (int t = 0; t < 20; ++t) {
        const auto a = random_matrix(rng, 3, 4);
        const auto b = random_matrix(rng, 3, 5);
        const auto d = column_distance_matrix(a, b, CostKind::squared);
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 5; ++j) {
                const std::span<const double> x(a.col(i).data(), 3);
                const std::span<const double> y(b.col(j).data(), 3);
                EXPECT_EQ(d(i, j), oracle::dtw_bruteforce(x, y, CostKind::squared));
            }
        }
    }
}

TEST(ColumnDistanceMatrix, DifferentProfileLengths) {
    Rng rng(23);
    const auto a = random_matrix(rng, 4, 3);
    const auto b = random_matrix(rng, 7, 2);
    const auto d = column_distance_matrix(a, b);
    EXPECT_EQ(d.rows(), 3);
    EXPECT_EQ(d.cols(), 2);
}

TEST(ColumnDistanceMatrix, ThreadedIsBitwiseIdentical) {
    Rng rng(24);
    const auto a = random_matrix(rng, 20, 17);
    const auto b = random_matrix(rng, 23, 19);
    const auto seq = column_distance_matrix(a, b, CostKind::absolute, 1);
    for (int threads : {2, 3, 8, 64}) {
        const auto par = column_distance_matrix(a, b, CostKind::absolute, threads);
        EXPECT_TRUE((seq.array() == par.array()).all()) << threads << " threads";
    }
}

TEST(ColumnDistanceMatrix, RejectsEmptyGrid) {
    EXPECT_THROW(column_distance_matrix(Eigen::MatrixXd(0, 3), Eigen::MatrixXd(2, 2)), InvalidInput);
    EXPECT_THROW(column_distance_matrix(Eigen::MatrixXd(2, 2), Eigen::MatrixXd(2, 0)), InvalidInput);
}

TEST(LocalMinMapping, Examples) {
    Eigen::MatrixXd d(3, 3);
    d << 0, 1, 1, 1, 0, 1, 1, 1, 0;
    EXPECT_EQ(local_min_mapping(d), (std::vector<int>{1, 2, 3}));

    Eigen::MatrixXd row(1, 3);
    row << 5, 1, 1;
    EXPECT_EQ(local_min_mapping(row), (std::vector<int>{2}));
}

TEST(LocalMinMapping, SpuriousZeroCausesJump) {
    // A clean diagonal valley with one planted off-valley zero in row 2.
    Eigen::MatrixXd d(4, 4);
    d << 0.0, 1.0, 2.0, 3.0,
         1.0, 0.2, 1.0, 0.0,
         2.0, 1.0, 0.0, 1.0,
         3.0, 2.0, 1.0, 0.0;
    const auto loc = local_min_mapping(d);
    EXPECT_EQ(loc, (std::vector<int>{1, 4, 3, 4}));
    EXPECT_GT(loc[1], loc[2]);  // not monotone
    const auto dp = path_to_mapping(river_path_dp(d), 4);
    EXPECT_EQ(dp, identity_mapping(4));
}

TEST(RiverPathDp, ZeroLandscapeTakesDiagonal) {
    const auto r = river_path_dp(Eigen::MatrixXd::Zero(3, 3), EndpointMode::fixed);
    EXPECT_EQ(r.cost, 0.0);
    const std::vector<IndexPair> expected{{1, 1}, {2, 2}, {3, 3}};
    EXPECT_EQ(r.path.steps, expected);
}

TEST(RiverPathDp, AvoidsOffDiagonalNines) {
    Eigen::MatrixXd d(2, 2);
    d << 0, 9, 9, 0;
    const auto r = river_path_dp(d, EndpointMode::fixed);
    EXPECT_EQ(r.cost, 0.0);
    EXPECT_EQ(r.path.steps.size(), 2u);
}

TEST(RiverPathDp, FreeModeSkipsExpensiveCorners) {
    Eigen::MatrixXd d(2, 4);
    d << 9, 0, 9, 9,
         9, 9, 0, 9;
    const auto fixed = river_path_dp(d, EndpointMode::fixed);
    const auto free = river_path_dp(d, EndpointMode::free_j);
    EXPECT_EQ(free.cost, 0.0);
    const std::vector<IndexPair> expected{{1, 2}, {2, 3}};
    EXPECT_EQ(free.path.steps, expected);
    EXPECT_TRUE(validate_path(free.path, EndpointMode::free_j));
    EXPECT_FALSE(validate_path(free.path, EndpointMode::fixed));
    EXPECT_GT(fixed.cost, free.cost);
}

TEST(RiverPathDp, MatchesEnumerationOnRandomLandscapes) {
    Rng rng(25);
    for (int t = 0; t < 200; ++t) {
        const int q = 1 + static_cast<int>(rng.uniform() * 6);
        const int s = 1 + static_cast<int>(rng.uniform() * 7);
        const auto d = random_matrix(rng, q, s);
        for (auto mode : {EndpointMode::fixed, EndpointMode::free_j}) {
            const auto r = river_path_dp(d, mode);
            ASSERT_TRUE(validate_path(r.path, mode));
            EXPECT_DOUBLE_EQ(r.cost, oracle::enumerate_paths(d, mode));
            EXPECT_DOUBLE_EQ(path_cost(d, r.path), r.cost);
        }
        EXPECT_LE(river_path_dp(d, EndpointMode::free_j).cost, river_path_dp(d, EndpointMode::fixed).cost);
    }
}

TEST(RiverPathDp, ScalingKeepsPath) {
    Rng rng(26);
    for (int t = 0; t < 50; ++t) {
        const auto d = random_matrix(rng, 6, 7);
        for (auto mode : {EndpointMode::fixed, EndpointMode::free_j}) {
            const auto a = river_path_dp(d, mode);
            const auto b = river_path_dp(4.0 * d, mode);
            EXPECT_EQ(a.path.steps, b.path.steps);
            EXPECT_DOUBLE_EQ(b.cost, 4.0 * a.cost);
        }
    }
}

TEST(EnumeratePaths, SmallCases) {
    EXPECT_EQ(oracle::enumerate_paths(Eigen::MatrixXd::Constant(1, 1, 2.5), EndpointMode::fixed), 2.5);
    EXPECT_EQ(oracle::enumerate_paths(Eigen::MatrixXd::Ones(2, 2), EndpointMode::fixed), 2.0);
    EXPECT_THROW(oracle::enumerate_paths(Eigen::MatrixXd::Ones(7, 8), EndpointMode::fixed),
                 SizeGuardExceeded);
}

TEST(RiverPathGreedy, ZeroLandscapeReachesCorner) {
    const auto r = river_path_greedy(Eigen::MatrixXd::Zero(3, 4), {1, 1});
    EXPECT_EQ(r.cost, 0.0);
    EXPECT_EQ(r.path.steps.back(), (IndexPair{3, 4}));
    EXPECT_EQ(r.mode, EndpointMode::fixed);
    EXPECT_TRUE(validate_path(r.path, EndpointMode::fixed));
}

TEST(RiverPathGreedy, FollowsSingleValley) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(5, 6, 3.0);
    const std::vector<IndexPair> valley{{1, 1}, {2, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}};
    for (const auto& p : valley) d(p.i - 1, p.j - 1) = 0.0;
    const auto g = river_path_greedy(d, {1, 1});
    const auto dp = river_path_dp(d, EndpointMode::fixed);
    EXPECT_EQ(g.path.steps, valley);
    EXPECT_EQ(g.path.steps, dp.path.steps);
    EXPECT_EQ(g.cost, dp.cost);
}

TEST(RiverPathGreedy, CheckedInCounterexample) {
    // The cheap first steps down column 1 lead into the 9 on the last row.
    Eigen::MatrixXd d(4, 4);
    d << 0, 0, 1, 1,
         0, 2, 2, 1,
         0, 2, 2, 1,
         2, 2, 9, 0;
    const auto g = river_path_greedy(d, {1, 1});
    const auto dp = river_path_dp(d, EndpointMode::fixed);
    EXPECT_EQ(g.cost, 11.0);
    EXPECT_EQ(dp.cost, 3.0);
    EXPECT_EQ(oracle::enumerate_paths(d, EndpointMode::fixed), 3.0);
}

TEST(RiverPathGreedy, DefaultStartAndRange) {
    Eigen::MatrixXd d(2, 3);
    d << 4, 1, 1,
         0, 0, 0;
    EXPECT_EQ(default_greedy_start(d), (IndexPair{1, 2}));
    const auto r = river_path_greedy(d);
    EXPECT_EQ(r.mode, EndpointMode::free_j);
    EXPECT_EQ(r.path.steps.front(), (IndexPair{1, 2}));
    EXPECT_THROW(river_path_greedy(d, {0, 1}), InvalidInput);
    EXPECT_THROW(river_path_greedy(d, {1, 4}), InvalidInput);
}

TEST(RiverPathGreedy, NeverBeatsDp) {
    Rng rng(27);
    for (int t = 0; t < 300; ++t) {
        const auto d = random_matrix(rng, 2 + static_cast<int>(rng.uniform() * 6),
                                     2 + static_cast<int>(rng.uniform() * 6));
        EXPECT_GE(river_path_greedy(d, {1, 1}).cost, river_path_dp(d, EndpointMode::fixed).cost);
        EXPECT_GE(river_path_greedy(d).cost, river_path_dp(d, EndpointMode::free_j).cost);
    }
}

TEST(PathToMapping, Examples) {
    RiverPath p;
    p.path = {{{1, 1}, {2, 2}, {3, 3}}, 3, 3};
    EXPECT_EQ(path_to_mapping(p, 3), (ColumnMapping{1, 2, 3}));
    p.path = {{{1, 1}, {1, 2}, {2, 3}}, 2, 3};
    EXPECT_EQ(path_to_mapping(p, 2), (ColumnMapping{1.5, 3}));
}

TEST(PathToMapping, RejectsSkippedRow) {
    RiverPath p;
    p.path = {{{1, 1}, {3, 2}}, 3, 2};
    EXPECT_THROW(path_to_mapping(p, 3), InvalidInput);
}

TEST(PathToMapping, DpMappingsAreMonotoneAndInRange) {
    Rng rng(28);
    for (int t = 0; t < 300; ++t) {
        const int q = 1 + static_cast<int>(rng.uniform() * 9);
        const int s = 1 + static_cast<int>(rng.uniform() * 9);
        const auto d = random_matrix(rng, q, s);
        for (auto mode : {EndpointMode::fixed, EndpointMode::free_j}) {
            const auto a = path_to_mapping(river_path_dp(d, mode), q);
            ASSERT_EQ(a.size(), static_cast<std::size_t>(q));
            for (std::size_t i = 0; i < a.size(); ++i) {
                EXPECT_GE(a[i], 1.0);
                EXPECT_LE(a[i], s);
                if (i > 0) EXPECT_GE(a[i], a[i - 1]);
            }
        }
    }
}

TEST(MatchGrid, SelfMatchIsIdentity) {
    Rng rng(29);
    for (int t = 0; t < 30; ++t) {
        const auto a = random_matrix(rng, 6, 8);
        const auto r = match_grid(a, a);
        EXPECT_EQ(r.column_mapping, identity_mapping(8));
        EXPECT_EQ(r.row_mapping, identity_mapping(6));
        EXPECT_EQ(r.d_cols.rows(), 8);
        EXPECT_EQ(r.d_rows.rows(), 6);
    }
}

TEST(MatchGrid, DuplicatedColumnSplitsMapping) {
    const auto a = smooth_grid(7, 6, 0.3);
    const int dup = 3;  // 1-based column of A that appears twice in B
    Eigen::MatrixXd b(7, 7);
    b.leftCols(dup) = a.leftCols(dup);
    b.col(dup) = a.col(dup - 1);
    b.rightCols(6 - dup) = a.rightCols(6 - dup);

    const auto r = match_grid(a, b);
    EXPECT_EQ(r.column_path.cost, 0.0);
    EXPECT_EQ(oracle::enumerate_paths(r.d_cols, EndpointMode::fixed), 0.0);
    EXPECT_EQ(r.column_mapping, (ColumnMapping{1, 2, 3.5, 5, 6, 7}));
}

TEST(MatchGrid, NoisyCopyStaysNearIdentity) {
    Rng rng(30);
    for (int t = 0; t < 50; ++t) {
        const auto a = smooth_grid(12, 10, rng.uniform(0.0, 6.0));
        const double range = a.maxCoeff() - a.minCoeff();
        Eigen::MatrixXd b = a;
        for (double& v : b.reshaped()) v += rng.normal(0.0, 0.05 * range);
        const auto r = match_grid(a, b);
        for (std::size_t i = 0; i < r.column_mapping.size(); ++i) {
            EXPECT_LE(std::abs(r.column_mapping[i] - static_cast<double>(i + 1)), 1.0) << "trial " << t;
        }
        for (std::size_t i = 0; i < r.row_mapping.size(); ++i) {
            EXPECT_LE(std::abs(r.row_mapping[i] - static_cast<double>(i + 1)), 1.0) << "trial " << t;
        }
    }
}
