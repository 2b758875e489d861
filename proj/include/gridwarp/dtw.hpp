#pragma once

#include <compare>
#include <span>
#include <vector>

namespace gridwarp {

enum class CostKind { absolute, squared };

// Which ends of the second axis are pinned. `fixed` pins both corners,
// `free_j` pins only the first/last index on the first axis.
enum class EndpointMode { fixed, free_j };

// 1-based (i, j) cell of an alignment lattice.
struct IndexPair {
    int i = 1;
    int j = 1;

    friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

// Monotone lattice path; `rows` x `cols` are the dimensions of the aligned
// objects (sequence lengths, or the shape of a distance landscape).
struct WarpPath {
    std::vector<IndexPair> steps;
    int rows = 0;
    int cols = 0;
};

struct DtwResult {
    double cost = 0.0;
    WarpPath path;
};

inline double local_cost(double a, double b, CostKind kind = CostKind::absolute) {
    const double d = a > b ? a - b : b - a;
    return kind == CostKind::squared ? d * d : d;
}

// Full DTW with backtracked path. Ties in the backtrack prefer the diagonal
// predecessor, then (i-1, j), then (i, j-1).
DtwResult dtw(std::span<const double> x, std::span<const double> y,
              CostKind kind = CostKind::absolute);

// Cost-only DTW using a caller-owned rolling buffer, so repeated calls do not
// allocate. Produces bit-identical costs to dtw().
double dtw_distance(std::span<const double> x, std::span<const double> y,
                    CostKind kind, std::vector<double>& scratch);

double dtw_distance(std::span<const double> x, std::span<const double> y,
                    CostKind kind = CostKind::absolute);

// Boundary, monotonicity and step constraints for the given endpoint mode.
bool validate_path(const WarpPath& path, EndpointMode mode = EndpointMode::fixed);

}  // namespace gridwarp
