#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "gridwarp/geometry.hpp"
#include "gridwarp/image.hpp"

namespace gridwarp {

// Axis-aligned box standing on the ground: [x0, x1) x [y0, y1), top at `height`.
struct Block {
    double x0 = 0.0;
    double x1 = 0.0;
    double y0 = 0.0;
    double y1 = 0.0;
    double height = 0.0;
};

// Raised-cosine bump: amplitude * (1 + cos(pi d / radius)) / 2 for d < radius.
struct Bump {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.0;
    double amplitude = 0.0;
};

struct Terrain {
    std::vector<Block> blocks;
    std::vector<Bump> bumps;

    // Highest block under (x, y) plus every bump contribution.
    double height_at(double x, double y) const;
    // Index of the highest block under (x, y), or -1 on open ground.
    int region_at(double x, double y) const;
    // Upper bound on height_at over the plane.
    double max_height() const;

    // Heights >= 0, radii > 0, non-empty footprints within +-kSceneHalfExtent.
    void validate() const;

    static constexpr double kSceneHalfExtent = 0.5;  // m
};

struct NoiseConfig {
    double pixel_sigma_px = 0.0;      // per-node image displacement
    double image_sigma = 0.0;         // additive Gaussian image noise
    double dropout_prob = 0.0;        // per-node chance the intersection is erased
    double texture_amplitude = 0.0;   // floor texture, std of a smooth random field
    double texture_scale_px = 4.0;    // blur sigma of that field
};

struct RenderConfig {
    int width = 640;
    int height = 640;
    double line_width_px = 3.0;
    int samples_per_cell = 16;
    double line_margin_cells = 0.5;   // lines overhang the outer nodes by this much
    double background = 0.08;
    double line_level = 0.85;
};

// Parameters of the reconstruction pipeline stored alongside the scene.
struct PipelineConfig {
    double blur_sigma_px = 1.0;
    double log_sigma_px = 2.0;
    double threshold = 0.6;
    double merge_radius_px = 8.0;
    double refine_radius_px = 12.0;
    double max_residual_m = 2e-4;
    bool gain_compensation = false;
};

struct SceneConfig {
    std::uint64_t seed = 1;
    DisplayGrid grid;
    Intrinsics intrinsics;
    Pose pose;
    Eigen::Vector3d camera_position = Eigen::Vector3d::Zero();
    Eigen::Vector3d camera_target = Eigen::Vector3d::Zero();
    double fov_limit_deg = 10.0;
    NoiseConfig noise;
    RenderConfig render;
    PipelineConfig pipeline;
    Terrain terrain;

    void validate() const;

    // Desk-scale default: 8x8 grid at 3 mm pitch, display at 3 cm, camera
    // 0.5 m above the grid center with a 3 cm lateral offset along -x.
    static SceneConfig defaults();
};

// Per-node realization of the stochastic scene parameters.
struct NodeNoise {
    std::vector<Eigen::Vector2d> jitter;  // px
    std::vector<bool> dropped;
};

struct GroundTruth {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<Eigen::Vector3d> points;           // terrain point under each node
    std::vector<Eigen::Vector2d> pixels;           // exact projections of `points`
    std::vector<Eigen::Vector2d> observed_pixels;  // pixels + node jitter
    std::vector<bool> visible;                     // in view, inside FOV, unoccluded
    std::vector<bool> dropped;
    HeightMap height_map;

    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row - 1) * n_cols + static_cast<std::size_t>(col - 1);
    }
};

// Vertical drop of every display node onto the terrain, row-major.
// Throws SceneInvalid where the terrain reaches the display plane.
std::vector<Eigen::Vector3d> project_grid_to_ground(const DisplayGrid& grid, const Terrain& terrain);

// Radial SN-VCF response: 1 inside 80% of the limit, cosine-squared taper to
// 0 at the limit.
double fov_gain(const SceneConfig& cfg, const Eigen::Vector2d& pixel);

// True when the segment from `point` to the camera center passes under the terrain.
bool occluded(const Terrain& terrain, const Eigen::Vector3d& point, const Eigen::Vector3d& camera);

NodeNoise draw_node_noise(const SceneConfig& cfg);

GrayImage render_scene(const SceneConfig& cfg, const Terrain& terrain);

GroundTruth emit_ground_truth(const SceneConfig& cfg, const Terrain& terrain);

// Divides out fov_gain where it exceeds `min_gain`; zero elsewhere.
GrayImage compensate_gain(const SceneConfig& cfg, const GrayImage& img, double min_gain = 0.05);

}  // namespace gridwarp
