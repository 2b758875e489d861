#include "gridwarp/grid_match.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "gridwarp/errors.hpp"

namespace gridwarp {

namespace {

void require_grid(const ColumnGrid& g, const char* name) {
    if (g.rows() < 1 || g.cols() < 1) {
        throw InvalidInput(std::string("grid ") + name + " is empty");
    }
    if (!g.allFinite()) {
        throw InvalidInput(std::string("grid ") + name + " has non-finite entries");
    }
}

void require_landscape(const DistanceLandscape& d) {
    if (d.rows() < 1 || d.cols() < 1) throw InvalidInput("distance landscape is empty");
}

void fill_rows(const ColumnGrid& a, const ColumnGrid& b, CostKind kind, DistanceLandscape& d,
               Eigen::Index first, Eigen::Index stride) {
    std::vector<double> scratch;
    for (Eigen::Index i = first; i < a.cols(); i += stride) {
        std::span<const double> x(a.col(i).data(), static_cast<std::size_t>(a.rows()));
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            std::span<const double> y(b.col(j).data(), static_cast<std::size_t>(b.rows()));
            d(i, j) = dtw_distance(x, y, kind, scratch);
        }
    }
}

}  // namespace

DistanceLandscape column_distance_matrix(const ColumnGrid& a, const ColumnGrid& b, CostKind kind,
                                         int threads) {
    require_grid(a, "A");
    require_grid(b, "B");

    DistanceLandscape d(a.cols(), b.cols());
    const Eigen::Index workers = std::clamp<Eigen::Index>(threads, 1, a.cols());
    if (workers == 1) {
        fill_rows(a, b, kind, d, 0, 1);
        return d;
    }

    {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (Eigen::Index w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] { fill_rows(a, b, kind, d, w, workers); });
        }
    }
    return d;
}

std::vector<int> local_min_mapping(const DistanceLandscape& d) {
    require_landscape(d);
    std::vector<int> mapping(static_cast<std::size_t>(d.rows()));
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index j = 1; j < d.cols(); ++j) {
            if (d(i, j) < d(i, best)) best = j;
        }
        mapping[static_cast<std::size_t>(i)] = static_cast<int>(best) + 1;
    }
    return mapping;
}

RiverPath river_path_dp(const DistanceLandscape& d, EndpointMode mode) {
    require_landscape(d);
    const Eigen::Index q = d.rows();
    const Eigen::Index s = d.cols();

    Eigen::MatrixXd f(q, s);
    f(0, 0) = d(0, 0);
    for (Eigen::Index j = 1; j < s; ++j) {
        f(0, j) = mode == EndpointMode::free_j ? d(0, j) : d(0, j) + f(0, j - 1);
    }
    for (Eigen::Index i = 1; i < q; ++i) {
        f(i, 0) = d(i, 0) + f(i - 1, 0);
        for (Eigen::Index j = 1; j < s; ++j) {
            f(i, j) = d(i, j) + std::min({f(i - 1, j), f(i, j - 1), f(i - 1, j - 1)});
        }
    }

    Eigen::Index i = q - 1;
    Eigen::Index j = s - 1;
    if (mode == EndpointMode::free_j) {
        j = 0;
        for (Eigen::Index c = 1; c < s; ++c) {
            if (f(q - 1, c) < f(q - 1, j)) j = c;
        }
    }

    RiverPath river;
    river.mode = mode;
    river.cost = f(i, j);
    river.path.rows = static_cast<int>(q);
    river.path.cols = static_cast<int>(s);
    auto& steps = river.path.steps;
    steps.push_back({static_cast<int>(i) + 1, static_cast<int>(j) + 1});

    auto done = [&] { return mode == EndpointMode::free_j ? i == 0 : (i == 0 && j == 0); };
    while (!done()) {
        if (i == 0) {
            --j;
        } else if (j == 0) {
            --i;
        } else {
            const double diag = f(i - 1, j - 1);
            const double up = f(i - 1, j);
            const double left = f(i, j - 1);
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
    return river;
}

IndexPair default_greedy_start(const DistanceLandscape& d) {
    require_landscape(d);
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < d.cols(); ++j) {
        if (d(0, j) < d(0, best)) best = j;
    }
    return {1, static_cast<int>(best) + 1};
}

RiverPath river_path_greedy(const DistanceLandscape& d, IndexPair start) {
    require_landscape(d);
    const int q = static_cast<int>(d.rows());
    const int s = static_cast<int>(d.cols());
    if (start.i < 1 || start.i > q || start.j < 1 || start.j > s) {
        throw InvalidInput("greedy start (" + std::to_string(start.i) + ", " +
                           std::to_string(start.j) + ") is outside the landscape");
    }

    RiverPath river;
    river.mode = (start.i == 1 && start.j == 1) ? EndpointMode::fixed : EndpointMode::free_j;
    river.path.rows = q;
    river.path.cols = s;

    IndexPair at = start;
    river.path.steps.push_back(at);
    double cost = d(at.i - 1, at.j - 1);
    while (at.i < q || at.j < s) {
        IndexPair next{};
        double best = 0.0;
        bool have = false;
        auto consider = [&](int ni, int nj) {
            if (ni > q || nj > s) return;
            const double v = d(ni - 1, nj - 1);
            if (!have || v < best) {
                next = {ni, nj};
                best = v;
                have = true;
            }
        };
        consider(at.i + 1, at.j + 1);
        consider(at.i + 1, at.j);
        consider(at.i, at.j + 1);
        at = next;
        cost += best;
        river.path.steps.push_back(at);
    }
    river.cost = cost;
    return river;
}

RiverPath river_path_greedy(const DistanceLandscape& d) {
    return river_path_greedy(d, default_greedy_start(d));
}

ColumnMapping path_to_mapping(const RiverPath& path, int q) {
    if (q < 1) throw InvalidInput("path_to_mapping: q must be positive");
    std::vector<double> sum(static_cast<std::size_t>(q), 0.0);
    std::vector<int> count(static_cast<std::size_t>(q), 0);
    for (const auto& step : path.path.steps) {
        if (step.i < 1 || step.i > q) throw InvalidInput("path_to_mapping: step row out of range");
        sum[static_cast<std::size_t>(step.i - 1)] += step.j;
        ++count[static_cast<std::size_t>(step.i - 1)];
    }
    ColumnMapping mapping(static_cast<std::size_t>(q));
    for (std::size_t i = 0; i < mapping.size(); ++i) {
        if (count[i] == 0) {
            throw InvalidInput("path_to_mapping: path skips row " + std::to_string(i + 1));
        }
        mapping[i] = sum[i] / count[i];
    }
    return mapping;
}

double path_cost(const DistanceLandscape& d, const WarpPath& path) {
    double total = 0.0;
    for (const auto& step : path.steps) total += d(step.i - 1, step.j - 1);
    return total;
}

GridMatchResult match_grid(const ColumnGrid& a, const ColumnGrid& b, const MatchOptions& options) {
    GridMatchResult result;
    result.d_cols = column_distance_matrix(a, b, options.cost, options.threads);
    result.column_path = river_path_dp(result.d_cols, options.mode);
    result.column_mapping = path_to_mapping(result.column_path, static_cast<int>(a.cols()));

    const ColumnGrid at = a.transpose();
    const ColumnGrid bt = b.transpose();
    result.d_rows = column_distance_matrix(at, bt, options.cost, options.threads);
    result.row_path = river_path_dp(result.d_rows, options.mode);
    result.row_mapping = path_to_mapping(result.row_path, static_cast<int>(at.cols()));
    return result;
}

}  // namespace gridwarp
