#include "gridwarp/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "gridwarp/errors.hpp"

namespace gridwarp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// 1-based slot nearest to a mapping value, or 0 when the value is not close
// to an integer.
int integral_slot(double a) {
    const double r = std::round(a);
    return std::abs(a - r) <= 0.25 ? static_cast<int>(r) : 0;
}

// Affine rescale of all entries onto [0, 1]; a constant matrix maps to 0.
Eigen::MatrixXd grid_relative(const Eigen::MatrixXd& m) {
    const double lo = m.minCoeff();
    const double span = m.maxCoeff() - lo;
    if (!(span > 0.0)) return Eigen::MatrixXd::Zero(m.rows(), m.cols());
    return (m.array() - lo) / span;
}

}  // namespace

GridMatchResult match_profiles(const ColumnProfiles& a, const ColumnProfiles& b,
                               const MatchOptions& options) {
    const Eigen::MatrixXd ax = grid_relative(a.abscissa);
    const Eigen::MatrixXd bx = grid_relative(b.abscissa);
    const Eigen::MatrixXd ay = grid_relative(a.grid);
    const Eigen::MatrixXd by = grid_relative(b.grid);

    GridMatchResult r;
    r.d_cols = column_distance_matrix(ax, bx, options.cost, options.threads);
    r.column_path = river_path_dp(r.d_cols, options.mode);
    r.column_mapping = path_to_mapping(r.column_path, static_cast<int>(ax.cols()));
    const Eigen::MatrixXd ayt = ay.transpose();
    const Eigen::MatrixXd byt = by.transpose();
    r.d_rows = column_distance_matrix(ayt, byt, options.cost, options.threads);
    r.row_path = river_path_dp(r.d_rows, options.mode);
    r.row_mapping = path_to_mapping(r.row_path, static_cast<int>(ayt.cols()));
    return r;
}

Extraction extract_intersections(const GrayImage& img, const PipelineConfig& p) {
    Extraction e;
    e.blurred = gaussian_blur(img, p.blur_sigma_px);
    e.enhanced = log_enhance(e.blurred, p.log_sigma_px);
    e.skeleton = skeletonize(binarize(e.enhanced, p.threshold));
    e.raw = detect_intersections(e.skeleton, p.merge_radius_px);
    e.points = refine_intersections(e.blurred, e.raw, p.refine_radius_px);
    return e;
}

std::vector<Eigen::Vector2d> predicted_pixels(const SceneConfig& cfg) {
    std::vector<Eigen::Vector2d> px;
    px.reserve(static_cast<std::size_t>(cfg.grid.n_rows * cfg.grid.n_cols));
    for (int r = 1; r <= cfg.grid.n_rows; ++r) {
        for (int c = 1; c <= cfg.grid.n_cols; ++c) {
            Eigen::Vector3d p = cfg.grid.node_position(r, c);
            p.z() = 0.0;
            px.push_back(project(cfg.intrinsics, cfg.pose, p));
        }
    }
    return px;
}

Correspondences correspond_by_grid(const GridMatchResult& match, const ColumnProfiles& predicted,
                                   const ColumnProfiles& observed, const IntersectionSet& points,
                                   int n_cols) {
    std::vector<int> claims(points.size(), 0);
    std::vector<std::pair<GridMatch, int>> candidates;
    for (int pr = 0; pr < predicted.slot.rows(); ++pr) {
        const int br = integral_slot(match.row_mapping[static_cast<std::size_t>(pr)]);
        if (br < 1 || br > observed.slot.rows()) continue;
        for (int pc = 0; pc < predicted.slot.cols(); ++pc) {
            const int node = predicted.slot(pr, pc);
            const int bc = integral_slot(match.column_mapping[static_cast<std::size_t>(pc)]);
            if (node < 0 || bc < 1 || bc > observed.slot.cols()) continue;
            const int k = observed.slot(br - 1, bc - 1);
            if (k < 0) continue;
            const Point2& p = points[static_cast<std::size_t>(k)];
            candidates.push_back(
                {GridMatch{node / n_cols + 1, node % n_cols + 1, Eigen::Vector2d(p.x, p.y)}, k});
            ++claims[static_cast<std::size_t>(k)];
        }
    }
    Correspondences out;
    for (const auto& [m, k] : candidates) {
        if (claims[static_cast<std::size_t>(k)] != 1) continue;
        out.matches.push_back(m);
        out.point_index.push_back(k);
    }
    return out;
}

Correspondences correspond_nearest(const std::vector<Eigen::Vector2d>& predicted, int n_rows,
                                   int n_cols, const IntersectionSet& points) {
    const std::size_t n = static_cast<std::size_t>(n_rows * n_cols);
    if (predicted.size() != n) throw InvalidInput("predicted pixels do not match the grid size");
    std::vector<int> owner(n, -1);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < points.size(); ++k) {
        const Eigen::Vector2d p(points[k].x, points[k].y);
        std::size_t node = 0;
        double d_min = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < n; ++m) {
            const double d = (predicted[m] - p).squaredNorm();
            if (d < d_min) {
                d_min = d;
                node = m;
            }
        }
        if (d_min < best[node]) {
            best[node] = d_min;
            owner[node] = static_cast<int>(k);
        }
    }
    Correspondences out;
    for (std::size_t m = 0; m < n; ++m) {
        if (owner[m] < 0) continue;
        const Point2& p = points[static_cast<std::size_t>(owner[m])];
        out.matches.push_back({static_cast<int>(m) / n_cols + 1, static_cast<int>(m) % n_cols + 1,
                               Eigen::Vector2d(p.x, p.y)});
        out.point_index.push_back(owner[m]);
    }
    return out;
}

TriangulationGates pipeline_gates(const SceneConfig& cfg) {
    return {cfg.pipeline.max_residual_m, -cfg.grid.height, cfg.grid.height};
}

Reconstruction reconstruct(const GrayImage& img, const SceneConfig& cfg,
                           const ReconstructOptions& options) {
    const int n_rows = cfg.grid.n_rows;
    const int n_cols = cfg.grid.n_cols;
    Reconstruction rec;

    auto t0 = Clock::now();
    const GrayImage input = cfg.pipeline.gain_compensation ? compensate_gain(cfg, img) : img;
    rec.extraction = extract_intersections(input, cfg.pipeline);
    const IntersectionSet& points = rec.extraction.points;
    rec.timings.emplace_back("extract", seconds_since(t0));

    t0 = Clock::now();
    const auto predicted = predicted_pixels(cfg);
    if (options.matcher == Matcher::dtw) {
        IntersectionSet predicted_points;
        for (const auto& p : predicted) predicted_points.push_back({p.x(), p.y()});
        rec.predicted = intersections_to_column_profiles(predicted_points, n_cols, n_rows, img.height);
        rec.observed = intersections_to_column_profiles(points, n_cols, n_rows, img.height);
        rec.match = match_profiles(rec.predicted, rec.observed, options.match);
        rec.correspondences = correspond_by_grid(rec.match, rec.predicted, rec.observed, points, n_cols);
    } else {
        if (points.empty()) throw ExtractionFailure("no intersections detected");
        rec.correspondences = correspond_nearest(predicted, n_rows, n_cols, points);
    }
    rec.timings.emplace_back("match", seconds_since(t0));

    t0 = Clock::now();
    rec.height_map = triangulate_matches(rec.correspondences.matches, cfg.intrinsics, cfg.pose,
                                         cfg.grid, pipeline_gates(cfg));
    rec.timings.emplace_back("triangulate", seconds_since(t0));
    return rec;
}

}  // namespace gridwarp
