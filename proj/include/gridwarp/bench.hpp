#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gridwarp/grid_match.hpp"

namespace gridwarp {

struct BenchRow {
    int n = 0;
    double mean_seconds = 0.0;  // one column_distance_matrix + river_path_dp call
    int calls = 0;              // timed calls behind the mean
};

struct BenchOptions {
    std::vector<int> sizes{8, 16, 32, 64};
    int trials = 3;
    std::uint64_t seed = 1;
    MatchOptions match;
    // Each trial repeats the call until at least this much time has passed,
    // so small sizes are not dominated by timer resolution.
    double min_trial_seconds = 0.02;
};

// Times the column pass on uniform random N x N grids. Inputs depend only on
// (seed, N). Throws InvalidInput for sizes below 4 or trials below 1.
std::vector<BenchRow> bench_match(const BenchOptions& options);

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;  // log(seconds) at log(N) = 0
};

// Least-squares line through (log N, log seconds); empty for fewer than two sizes.
std::optional<LogLogFit> fit_loglog(const std::vector<BenchRow>& rows);

void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows);

// Standalone SVG log-log plot of the measurements and the fitted line.
std::string bench_svg(const std::vector<BenchRow>& rows, const std::optional<LogLogFit>& fit);

}  // namespace gridwarp
