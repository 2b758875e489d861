#include "gridwarp/oracles.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <string>

#include "gridwarp/errors.hpp"

namespace gridwarp::oracle {

double dtw_bruteforce(std::span<const double> x, std::span<const double> y, CostKind kind) {
    const int m = static_cast<int>(x.size());
    const int n = static_cast<int>(y.size());
    if (m < 1 || n < 1) throw InvalidInput("dtw_bruteforce: empty sequence");
    if (m + n > kMaxBruteforceLength) {
        throw SizeGuardExceeded("dtw_bruteforce: m + n = " + std::to_string(m + n) +
                                " exceeds " + std::to_string(kMaxBruteforceLength));
    }

    double best = std::numeric_limits<double>::infinity();
    // Costs are accumulated from the start of the path so every candidate is
    // summed in path order.
    std::function<void(int, int, double)> walk = [&](int i, int j, double acc) {
        acc += local_cost(x[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(j)], kind);
        if (i == m - 1 && j == n - 1) {
            best = std::min(best, acc);
            return;
        }
        if (i + 1 < m) walk(i + 1, j, acc);
        if (j + 1 < n) walk(i, j + 1, acc);
        if (i + 1 < m && j + 1 < n) walk(i + 1, j + 1, acc);
    };
    walk(0, 0, 0.0);
    return best;
}

double enumerate_paths(const DistanceLandscape& d, EndpointMode mode) {
    const int q = static_cast<int>(d.rows());
    const int s = static_cast<int>(d.cols());
    if (q < 1 || s < 1) throw InvalidInput("enumerate_paths: empty landscape");
    if (q + s > kMaxEnumerateExtent) {
        throw SizeGuardExceeded("enumerate_paths: q + s = " + std::to_string(q + s) +
                                " exceeds " + std::to_string(kMaxEnumerateExtent));
    }

    double best = std::numeric_limits<double>::infinity();
    std::function<void(int, int, double)> walk = [&](int i, int j, double acc) {
        acc += d(i, j);
        if (i == q - 1 && (mode == EndpointMode::free_j || j == s - 1)) {
            best = std::min(best, acc);
        }
        if (i + 1 < q) walk(i + 1, j, acc);
        if (j + 1 < s) walk(i, j + 1, acc);
        if (i + 1 < q && j + 1 < s) walk(i + 1, j + 1, acc);
    };

    if (mode == EndpointMode::fixed) {
        walk(0, 0, 0.0);
    } else {
        for (int j = 0; j < s; ++j) walk(0, j, 0.0);
    }
    return best;
}

}  // namespace gridwarp::oracle
