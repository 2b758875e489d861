#pragma once

#include <Eigen/Core>
#include <vector>

#include "gridwarp/dtw.hpp"

namespace gridwarp {

// p x q matrix; column i is the vertical profile A_i.
using ColumnGrid = Eigen::MatrixXd;

// q x s matrix of pairwise column DTW distances, all entries >= 0.
using DistanceLandscape = Eigen::MatrixXd;

// a(i) for i = 1..q, stored 0-based; values are 1-based positions in [1, s].
using ColumnMapping = std::vector<double>;

struct RiverPath {
    WarpPath path;
    EndpointMode mode = EndpointMode::fixed;
    double cost = 0.0;
};

struct MatchOptions {
    CostKind cost = CostKind::absolute;
    EndpointMode mode = EndpointMode::fixed;
    // Worker threads for the distance landscape; <= 1 runs inline.
    int threads = 1;
};

struct GridMatchResult {
    ColumnMapping column_mapping;
    ColumnMapping row_mapping;
    DistanceLandscape d_cols;
    DistanceLandscape d_rows;
    RiverPath column_path;
    RiverPath row_path;
};

// D(i, j) = dtw(A_i, B_j). Cells are independent, so a threaded build is
// bitwise identical to the sequential one.
DistanceLandscape column_distance_matrix(const ColumnGrid& a, const ColumnGrid& b,
                                         CostKind kind = CostKind::absolute, int threads = 1);

// Baseline: a(i) = first argmin of row i. Not guaranteed monotone.
std::vector<int> local_min_mapping(const DistanceLandscape& d);

// Minimum-cost river path by dynamic programming.
//
// fixed:  F(1,1) = D(1,1), first row/column accumulate, path (1,1) -> (q,s).
// free_j: F(1,j) = D(1,j) for every j (free start); the end column is the
//         first argmin of the last row of F (free end).
//
// Backtracking prefers the diagonal predecessor, then (i-1, j), then (i, j-1).
RiverPath river_path_dp(const DistanceLandscape& d, EndpointMode mode = EndpointMode::fixed);

// Default greedy start: (1, first argmin of row 1).
IndexPair default_greedy_start(const DistanceLandscape& d);

// Walks to the cheapest forward neighbour until (q, s). Ties prefer the
// diagonal, then (i+1, j), then (i, j+1). The result carries free_j mode
// unless the start is (1, 1).
RiverPath river_path_greedy(const DistanceLandscape& d, IndexPair start);
RiverPath river_path_greedy(const DistanceLandscape& d);

// a(i) = mean of the j values the path visits in row i.
ColumnMapping path_to_mapping(const RiverPath& path, int q);

// Sum of D along a path (1-based cells).
double path_cost(const DistanceLandscape& d, const WarpPath& path);

GridMatchResult match_grid(const ColumnGrid& a, const ColumnGrid& b,
                           const MatchOptions& options = {});

}  // namespace gridwarp
