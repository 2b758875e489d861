#include "gridwarp/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gridwarp/errors.hpp"

namespace gridwarp {

namespace {

void require_sequence(std::span<const double> s, const char* name) {
    if (s.empty()) {
        throw InvalidInput(std::string("dtw: sequence ") + name + " is empty");
    }
}

void require_finite(std::span<const double> s, const char* name) {
    for (double v : s) {
        if (!std::isfinite(v)) {
            throw InvalidInput(std::string("dtw: sequence ") + name + " has a non-finite sample");
        }
    }
}

}  // namespace

DtwResult dtw(std::span<const double> x, std::span<const double> y, CostKind kind) {
    require_sequence(x, "x");
    require_sequence(y, "y");
    require_finite(x, "x");
    require_finite(y, "y");

    const std::size_t m = x.size();
    const std::size_t n = y.size();
    // acc[i * n + j] holds the accumulated cost of cell (i+1, j+1).
    std::vector<double> acc(m * n);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return acc[i * n + j]; };

    at(0, 0) = local_cost(x[0], y[0], kind);
    for (std::size_t j = 1; j < n; ++j) at(0, j) = at(0, j - 1) + local_cost(x[0], y[j], kind);
    for (std::size_t i = 1; i < m; ++i) {
        at(i, 0) = at(i - 1, 0) + local_cost(x[i], y[0], kind);
        for (std::size_t j = 1; j < n; ++j) {
            const double best = std::min({at(i - 1, j - 1), at(i - 1, j), at(i, j - 1)});
            at(i, j) = best + local_cost(x[i], y[j], kind);
        }
    }

    DtwResult result;
    result.cost = at(m - 1, n - 1);
    result.path.rows = static_cast<int>(m);
    result.path.cols = static_cast<int>(n);

    std::size_t i = m - 1;
    std::size_t j = n - 1;
    auto& steps = result.path.steps;
    steps.push_back({static_cast<int>(i) + 1, static_cast<int>(j) + 1});
    while (i > 0 || j > 0) {
        if (i == 0) {
            --j;
        } else if (j == 0) {
            --i;
        } else {
            const double diag = at(i - 1, j - 1);
            const double up = at(i - 1, j);
            const double left = at(i, j - 1);
            if (diag <= up && diag <= left) {
                --i;
                --j;
            } else if (up <= left) {
                --i;
            } else {
                --j;
            }
        }
        steps.push_back({static_cast<int>(i) + 1, static_cast<int>(j) + 1});
    }
    std::reverse(steps.begin(), steps.end());
    return result;
}

double dtw_distance(std::span<const double> x, std::span<const double> y, CostKind kind,
                    std::vector<double>& scratch) {
    require_sequence(x, "x");
    require_sequence(y, "y");

    const std::size_t n = y.size();
    scratch.resize(n);
    double* row = scratch.data();

    // Same summation order as dtw(), so both routes agree to the last bit.
    row[0] = local_cost(x[0], y[0], kind);
    for (std::size_t j = 1; j < n; ++j) row[j] = row[j - 1] + local_cost(x[0], y[j], kind);
    for (std::size_t i = 1; i < x.size(); ++i) {
        const double xi = x[i];
        double diag = row[0];
        row[0] = row[0] + local_cost(xi, y[0], kind);
        for (std::size_t j = 1; j < n; ++j) {
            const double up = row[j];
            const double best = std::min(std::min(diag, up), row[j - 1]);
            diag = up;
            row[j] = best + local_cost(xi, y[j], kind);
        }
    }
    return row[n - 1];
}

double dtw_distance(std::span<const double> x, std::span<const double> y, CostKind kind) {
    std::vector<double> scratch;
    return dtw_distance(x, y, kind, scratch);
}

bool validate_path(const WarpPath& path, EndpointMode mode) {
    const auto& s = path.steps;
    if (s.empty() || path.rows < 1 || path.cols < 1) return false;

    for (const auto& p : s) {
        if (p.i < 1 || p.i > path.rows || p.j < 1 || p.j > path.cols) return false;
    }

    if (s.front().i != 1 || s.back().i != path.rows) return false;
    if (mode == EndpointMode::fixed && (s.front().j != 1 || s.back().j != path.cols)) {
        return false;
    }

    for (std::size_t t = 1; t < s.size(); ++t) {
        const int di = s[t].i - s[t - 1].i;
        const int dj = s[t].j - s[t - 1].j;
        if (di < 0 || dj < 0) return false;
        const bool admissible = (di == 1 && dj == 0) || (di == 0 && dj == 1) || (di == 1 && dj == 1);
        if (!admissible) return false;
    }
    return true;
}

}  // namespace gridwarp
