#include "gridwarp/geometry.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <cmath>
#include <string>

#include "gridwarp/errors.hpp"

namespace gridwarp {

Eigen::Matrix3d Intrinsics::matrix() const {
    Eigen::Matrix3d k;
    k << fx, skew, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
    return k;
}

void Intrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) throw InvalidInput("focal lengths must be positive");
    if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(skew)) {
        throw InvalidInput("intrinsics must be finite");
    }
}

void Pose::validate() const {
    const Eigen::Matrix3d gram = rotation.transpose() * rotation;
    if (!gram.isApprox(Eigen::Matrix3d::Identity(), 1e-9) ||
        std::abs(rotation.determinant() - 1.0) > 1e-9) {
        throw InvalidInput("pose rotation is not in SO(3)");
    }
    if (!translation.allFinite()) throw InvalidInput("pose translation must be finite");
}

Pose Pose::look_at(const Eigen::Vector3d& position, const Eigen::Vector3d& target) {
    const Eigen::Vector3d forward_raw = target - position;
    if (forward_raw.norm() < 1e-12) throw GeometryError("look_at: target equals position");
    const Eigen::Vector3d forward = forward_raw.normalized();
    Eigen::Vector3d right = Eigen::Vector3d::UnitX() - Eigen::Vector3d::UnitX().dot(forward) * forward;
    if (right.norm() < 1e-9) throw GeometryError("look_at: viewing direction is parallel to world x");
    right.normalize();
    const Eigen::Vector3d down = forward.cross(right);

    Pose pose;
    pose.rotation.row(0) = right.transpose();
    pose.rotation.row(1) = down.transpose();
    pose.rotation.row(2) = forward.transpose();
    pose.translation = -pose.rotation * position;
    return pose;
}

Ray Ray::through(const Eigen::Vector3d& origin, const Eigen::Vector3d& direction) {
    const double n = direction.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw GeometryError("ray direction must be non-zero");
    return {origin, direction / n};
}

void DisplayGrid::validate() const {
    if (n_rows < 1 || n_cols < 1) throw InvalidInput("display grid needs at least one node");
    if (!(spacing > 0.0)) throw InvalidInput("display grid spacing must be positive");
    if (!(height > 0.0)) throw InvalidInput("display height must be positive");
}

Eigen::Vector3d DisplayGrid::node_position(int row, int col) const {
    if (!contains(row, col)) {
        throw InvalidInput("display node (" + std::to_string(row) + ", " + std::to_string(col) +
                           ") is outside the grid");
    }
    return {origin_x + (col - 1) * spacing, origin_y + (row - 1) * spacing, height};
}

DisplayGrid DisplayGrid::centered(int n_rows, int n_cols, double spacing, double height, double cx,
                                  double cy) {
    DisplayGrid g;
    g.n_rows = n_rows;
    g.n_cols = n_cols;
    g.spacing = spacing;
    g.height = height;
    g.origin_x = cx - 0.5 * (n_cols - 1) * spacing;
    g.origin_y = cy - 0.5 * (n_rows - 1) * spacing;
    return g;
}

HeightMap::HeightMap(int rows, int cols)
    : n_rows(rows),
      n_cols(cols),
      nodes(static_cast<std::size_t>(rows * cols), Eigen::Vector3d::Constant(std::nan(""))),
      valid(static_cast<std::size_t>(rows * cols), false),
      residual(static_cast<std::size_t>(rows * cols), std::nan("")) {}

std::size_t HeightMap::valid_count() const {
    std::size_t n = 0;
    for (bool v : valid) n += v ? 1 : 0;
    return n;
}

Eigen::Vector2d project(const Intrinsics& k, const Pose& pose, const Eigen::Vector3d& x) {
    const Eigen::Vector3d cam = pose.rotation * x + pose.translation;
    const Eigen::Vector3d h = k.matrix() * cam;
    if (std::abs(h.z()) < 1e-12) {
        throw GeometryError("projection is degenerate: point lies on the camera principal plane");
    }
    return {h.x() / h.z(), h.y() / h.z()};
}

Ray back_project(const Intrinsics& k, const Pose& pose, const Eigen::Vector2d& pixel) {
    const Eigen::Vector3d cam = k.matrix().inverse() * Eigen::Vector3d(pixel.x(), pixel.y(), 1.0);
    return Ray::through(pose.center(), pose.rotation.transpose() * cam);
}

Ray display_ray(const DisplayGrid& grid, int row, int col) {
    return {grid.node_position(row, col), -Eigen::Vector3d::UnitZ()};
}

Eigen::Vector3d ray_plane_intersect(const Ray& ray, const Plane& plane) {
    const double denom = plane.normal.dot(ray.direction);
    if (std::abs(denom) < 1e-12) throw GeometryError("ray is parallel to the plane");
    const double s = (plane.offset - plane.normal.dot(ray.origin)) / denom;
    if (s < 0.0) throw GeometryError("plane lies behind the ray origin");
    return ray.at(s);
}

LsqPoint two_ray_lsq_point(const Ray& a, const Ray& b) {
    const double cos_ab = a.direction.dot(b.direction);
    const double sin_ab = a.direction.cross(b.direction).norm();
    const double angle = std::atan2(sin_ab, std::abs(cos_ab));
    if (angle < kMinRayAngle) {
        throw IllConditioned("rays are within " + std::to_string(angle) + " rad of parallel", angle);
    }
    const Eigen::Vector3d w = a.origin - b.origin;
    const double da = a.direction.dot(w);
    const double db = b.direction.dot(w);
    const double denom = 1.0 - cos_ab * cos_ab;
    const double s = (cos_ab * db - da) / denom;
    const double t = (db - cos_ab * da) / denom;
    const Eigen::Vector3d pa = a.at(s);
    const Eigen::Vector3d pb = b.at(t);
    return {0.5 * (pa + pb), 0.5 * (pa - pb).norm()};
}

HeightMap triangulate_matches(const std::vector<GridMatch>& matches, const Intrinsics& k,
                              const Pose& pose, const DisplayGrid& grid,
                              const TriangulationGates& gates) {
    HeightMap map(grid.n_rows, grid.n_cols);
    for (const auto& m : matches) {
        if (!grid.contains(m.row, m.col) || !m.pixel.allFinite()) continue;
        try {
            const LsqPoint p = two_ray_lsq_point(back_project(k, pose, m.pixel),
                                                 display_ray(grid, m.row, m.col));
            const std::size_t idx = map.index(m.row, m.col);
            map.nodes[idx] = p.point;
            map.residual[idx] = p.residual;
            map.valid[idx] = p.point.allFinite() && p.residual <= gates.max_residual &&
                             p.point.z() >= gates.min_z && p.point.z() <= gates.max_z;
        } catch (const GeometryError&) {
            // node stays invalid
        }
    }
    return map;
}

}  // namespace gridwarp
