#pragma once

#include <Eigen/Core>
#include <limits>
#include <vector>

namespace gridwarp {

// World frame: z up, nominal ground z = 0, display plane z = h.

struct Intrinsics {
    double fx = 1.0;
    double fy = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    double skew = 0.0;

    Eigen::Matrix3d matrix() const;
    void validate() const;
};

// World -> camera: X_cam = R * X + t. Camera axes: x right, y down (image v),
// z along the optical axis.
struct Pose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    Eigen::Vector3d center() const { return -rotation.transpose() * translation; }
    void validate() const;

    // Camera at `position` with its optical axis through `target`; image x
    // follows the world x axis as closely as the viewing direction allows.
    static Pose look_at(const Eigen::Vector3d& position, const Eigen::Vector3d& target);
};

struct Ray {
    Eigen::Vector3d origin = Eigen::Vector3d::Zero();
    Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();

    // Normalizes `direction`; throws GeometryError on a zero vector.
    static Ray through(const Eigen::Vector3d& origin, const Eigen::Vector3d& direction);
    Eigen::Vector3d at(double s) const { return origin + s * direction; }
};

// { X : normal . X = offset }
struct Plane {
    Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
    double offset = 0.0;

    static Plane horizontal(double z) { return {Eigen::Vector3d::UnitZ(), z}; }
};

struct DisplayGrid {
    int n_rows = 1;
    int n_cols = 1;
    double spacing = 1.0;  // m
    double origin_x = 0.0;  // node (1, 1)
    double origin_y = 0.0;
    double height = 0.03;  // display plane z = height

    void validate() const;
    bool contains(int row, int col) const {
        return row >= 1 && row <= n_rows && col >= 1 && col <= n_cols;
    }
    // Rows advance along +y, columns along +x. 1-based.
    Eigen::Vector3d node_position(int row, int col) const;

    // Grid centered on (cx, cy).
    static DisplayGrid centered(int n_rows, int n_cols, double spacing, double height,
                                double cx = 0.0, double cy = 0.0);
};

struct HeightMap {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<Eigen::Vector3d> nodes;
    std::vector<bool> valid;
    std::vector<double> residual;  // triangulation residual (m), NaN when invalid

    HeightMap() = default;
    HeightMap(int rows, int cols);

    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row - 1) * n_cols + static_cast<std::size_t>(col - 1);
    }
    std::size_t valid_count() const;
};

Eigen::Vector2d project(const Intrinsics& k, const Pose& pose, const Eigen::Vector3d& x);

Ray back_project(const Intrinsics& k, const Pose& pose, const Eigen::Vector2d& pixel);

// Ray from the display node straight down along the display normal.
Ray display_ray(const DisplayGrid& grid, int row, int col);

Eigen::Vector3d ray_plane_intersect(const Ray& ray, const Plane& plane);

struct LsqPoint {
    Eigen::Vector3d point;
    double residual = 0.0;  // RMS orthogonal distance to the two rays
};

inline constexpr double kMinRayAngle = 1e-6;  // rad

// Midpoint of the common perpendicular of the two (infinite) ray lines.
LsqPoint two_ray_lsq_point(const Ray& a, const Ray& b);

struct GridMatch {
    int row = 1;  // display node, 1-based
    int col = 1;
    Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
};

// Acceptance gates for a triangulated node; failing any marks it invalid.
struct TriangulationGates {
    double max_residual = std::numeric_limits<double>::infinity();
    double min_z = -std::numeric_limits<double>::infinity();
    double max_z = std::numeric_limits<double>::infinity();
};

HeightMap triangulate_matches(const std::vector<GridMatch>& matches, const Intrinsics& k,
                              const Pose& pose, const DisplayGrid& grid,
                              const TriangulationGates& gates = {});

}  // namespace gridwarp
