#include "gridwarp/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gridwarp/errors.hpp"
#include "gridwarp/random.hpp"

namespace gridwarp {

namespace {

enum Stream : std::uint64_t { kNodeStream = 1, kTextureStream = 2, kImageNoiseStream = 3 };

double bump_height(const Bump& b, double x, double y) {
    const double d = std::hypot(x - b.cx, y - b.cy);
    if (d >= b.radius) return 0.0;
    return b.amplitude * 0.5 * (1.0 + std::cos(std::numbers::pi * d / b.radius));
}

}  // namespace

double Terrain::height_at(double x, double y) const {
    double h = 0.0;
    for (const auto& b : blocks) {
        if (x >= b.x0 && x < b.x1 && y >= b.y0 && y < b.y1) h = std::max(h, b.height);
    }
    for (const auto& b : bumps) h += bump_height(b, x, y);
    return h;
}

int Terrain::region_at(double x, double y) const {
    int region = -1;
    double top = 0.0;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto& b = blocks[k];
        if (x >= b.x0 && x < b.x1 && y >= b.y0 && y < b.y1 && (region < 0 || b.height > top)) {
            region = static_cast<int>(k);
            top = b.height;
        }
    }
    return region;
}

double Terrain::max_height() const {
    double h = 0.0;
    for (const auto& b : blocks) h = std::max(h, b.height);
    for (const auto& b : bumps) h += b.amplitude;
    return h;
}

void Terrain::validate() const {
    const double lim = kSceneHalfExtent;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto& b = blocks[k];
        const std::string name = "terrain.blocks[" + std::to_string(k) + "]";
        if (!(b.height >= 0.0)) throw SceneInvalid(name + ": height must be >= 0");
        if (!(b.x0 < b.x1) || !(b.y0 < b.y1)) throw SceneInvalid(name + ": empty footprint");
        if (b.x0 < -lim || b.x1 > lim || b.y0 < -lim || b.y1 > lim) {
            throw SceneInvalid(name + ": footprint leaves the scene bounds");
        }
    }
    for (std::size_t k = 0; k < bumps.size(); ++k) {
        const auto& b = bumps[k];
        const std::string name = "terrain.bumps[" + std::to_string(k) + "]";
        if (!(b.amplitude >= 0.0)) throw SceneInvalid(name + ": amplitude must be >= 0");
        if (!(b.radius > 0.0)) throw SceneInvalid(name + ": radius must be positive");
        if (std::abs(b.cx) > lim || std::abs(b.cy) > lim) {
            throw SceneInvalid(name + ": center leaves the scene bounds");
        }
    }
}

void SceneConfig::validate() const {
    grid.validate();
    intrinsics.validate();
    pose.validate();
    terrain.validate();
    if (!(fov_limit_deg > 0.0) || !(fov_limit_deg < 90.0)) {
        throw SceneInvalid("fov_limit_deg must lie in (0, 90)");
    }
    if (render.width < 64 || render.height < 64) throw SceneInvalid("image must be at least 64x64");
    if (!(render.line_width_px > 0.0)) throw SceneInvalid("line width must be positive");
    if (render.samples_per_cell < 1) throw SceneInvalid("samples_per_cell must be >= 1");
    if (noise.pixel_sigma_px < 0.0 || noise.image_sigma < 0.0 || noise.texture_amplitude < 0.0) {
        throw SceneInvalid("noise magnitudes must be >= 0");
    }
    if (!(noise.dropout_prob >= 0.0 && noise.dropout_prob <= 1.0)) {
        throw SceneInvalid("dropout probability must lie in [0, 1]");
    }
    if (!(noise.texture_scale_px > 0.0)) throw SceneInvalid("texture scale must be positive");
}

SceneConfig SceneConfig::defaults() {
    SceneConfig cfg;
    cfg.grid = DisplayGrid::centered(8, 8, 0.003, 0.03);
    cfg.intrinsics = {10000.0, 10000.0, 319.5, 319.5, 0.0};
    cfg.camera_position = {-0.03, 0.0, 0.5};
    cfg.camera_target = {0.0, 0.0, 0.0};
    cfg.pose = Pose::look_at(cfg.camera_position, cfg.camera_target);
    return cfg;
}

std::vector<Eigen::Vector3d> project_grid_to_ground(const DisplayGrid& grid, const Terrain& terrain) {
    grid.validate();
    std::vector<Eigen::Vector3d> points;
    points.reserve(static_cast<std::size_t>(grid.n_rows * grid.n_cols));
    for (int r = 1; r <= grid.n_rows; ++r) {
        for (int c = 1; c <= grid.n_cols; ++c) {
            Eigen::Vector3d p = grid.node_position(r, c);
            const double z = terrain.height_at(p.x(), p.y());
            if (z >= grid.height) {
                throw SceneInvalid("terrain under node (" + std::to_string(r) + ", " +
                                   std::to_string(c) + ") reaches the display plane");
            }
            p.z() = z;
            points.push_back(p);
        }
    }
    return points;
}

double fov_gain(const SceneConfig& cfg, const Eigen::Vector2d& pixel) {
    const double x = (pixel.x() - cfg.intrinsics.cx) / cfg.intrinsics.fx;
    const double y = (pixel.y() - cfg.intrinsics.cy) / cfg.intrinsics.fy;
    const double angle = std::atan(std::hypot(x, y));
    const double limit = cfg.fov_limit_deg * std::numbers::pi / 180.0;
    const double flat = 0.8 * limit;
    if (angle <= flat) return 1.0;
    if (angle >= limit) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * (angle - flat) / (limit - flat));
    return c * c;
}

bool occluded(const Terrain& terrain, const Eigen::Vector3d& point, const Eigen::Vector3d& camera) {
    const double top = terrain.max_height();
    if (point.z() >= top) return false;
    const Eigen::Vector3d d = camera - point;
    if (d.z() <= 0.0) return true;
    // Only the stretch of the sight line below the highest terrain matters.
    const double t_end = std::min(1.0, (top - point.z()) / d.z());
    const double horizontal = t_end * std::hypot(d.x(), d.y());
    const int steps = std::max(4, static_cast<int>(std::ceil(horizontal / 5e-5)));
    for (int k = 1; k <= steps; ++k) {
        const Eigen::Vector3d q = point + (t_end * k / steps) * d;
        if (terrain.height_at(q.x(), q.y()) > q.z() + 1e-12) return true;
    }
    return false;
}

NodeNoise draw_node_noise(const SceneConfig& cfg) {
    const std::size_t n = static_cast<std::size_t>(cfg.grid.n_rows * cfg.grid.n_cols);
    NodeNoise noise;
    noise.jitter.assign(n, Eigen::Vector2d::Zero());
    noise.dropped.assign(n, false);
    Rng rng(derive_seed(cfg.seed, kNodeStream));
    for (std::size_t k = 0; k < n; ++k) {
        const double jx = rng.normal();
        const double jy = rng.normal();
        const double drop = rng.uniform();
        noise.jitter[k] = cfg.noise.pixel_sigma_px * Eigen::Vector2d(jx, jy);
        noise.dropped[k] = drop < cfg.noise.dropout_prob;
    }
    return noise;
}

namespace {

// Bilinear interpolation of node jitter at a display-plane position.
Eigen::Vector2d jitter_at(const SceneConfig& cfg, const NodeNoise& noise, double x, double y) {
    const auto& g = cfg.grid;
    const double u = std::clamp((x - g.origin_x) / g.spacing, 0.0, g.n_cols - 1.0);
    const double v = std::clamp((y - g.origin_y) / g.spacing, 0.0, g.n_rows - 1.0);
    const int c0 = std::min(static_cast<int>(u), g.n_cols - 1);
    const int r0 = std::min(static_cast<int>(v), g.n_rows - 1);
    const int c1 = std::min(c0 + 1, g.n_cols - 1);
    const int r1 = std::min(r0 + 1, g.n_rows - 1);
    const double fu = u - c0;
    const double fv = v - r0;
    auto j = [&](int r, int c) {
        return noise.jitter[static_cast<std::size_t>(r) * g.n_cols + static_cast<std::size_t>(c)];
    };
    return (1 - fv) * ((1 - fu) * j(r0, c0) + fu * j(r0, c1)) +
           fv * ((1 - fu) * j(r1, c0) + fu * j(r1, c1));
}

struct Sample {
    Eigen::Vector2d pixel;
    int region = -1;
    bool visible = false;
};

void draw_segment(GrayImage& coverage, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                  double width) {
    const double reach = 0.5 * width + 1.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x(), b.x()) - reach)));
    const int x1 = std::min(coverage.width - 1, static_cast<int>(std::ceil(std::max(a.x(), b.x()) + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y(), b.y()) - reach)));
    const int y1 = std::min(coverage.height - 1, static_cast<int>(std::ceil(std::max(a.y(), b.y()) + reach)));
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const Eigen::Vector2d p(x, y);
            double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const double d = (p - (a + t * ab)).norm();
            const double c = std::clamp(0.5 * width + 0.5 - d, 0.0, 1.0);
            if (c > coverage.at(x, y)) coverage.at(x, y) = c;
        }
    }
}

void draw_line(const SceneConfig& cfg, const Terrain& terrain, const NodeNoise& noise,
               GrayImage& coverage, const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
    const double length = (to - from).norm();
    const int n = std::max(1, static_cast<int>(std::ceil(length / cfg.grid.spacing *
                                                          cfg.render.samples_per_cell)));
    const Eigen::Vector3d camera = cfg.pose.center();
    std::vector<Sample> samples(static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= n; ++k) {
        const Eigen::Vector3d d = from + (to - from) * (static_cast<double>(k) / n);
        const Eigen::Vector3d ground(d.x(), d.y(), terrain.height_at(d.x(), d.y()));
        auto& s = samples[static_cast<std::size_t>(k)];
        s.region = terrain.region_at(d.x(), d.y());
        s.visible = !occluded(terrain, ground, camera);
        if (s.visible) {
            s.pixel = project(cfg.intrinsics, cfg.pose, ground) + jitter_at(cfg, noise, d.x(), d.y());
        }
    }
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
        const auto& a = samples[k];
        const auto& b = samples[k + 1];
        // The vertical faces of blocks receive no light from straight-down rays.
        if (a.visible && b.visible && a.region == b.region) {
            draw_segment(coverage, a.pixel, b.pixel, cfg.render.line_width_px);
        }
    }
}

}  // namespace

GrayImage render_scene(const SceneConfig& cfg, const Terrain& terrain) {
    cfg.validate();
    terrain.validate();
    const auto& g = cfg.grid;
    const auto& r = cfg.render;
    const NodeNoise noise = draw_node_noise(cfg);

    GrayImage coverage(r.width, r.height, 0.0);
    const double margin = r.line_margin_cells * g.spacing;
    const double x_lo = g.origin_x - margin;
    const double x_hi = g.origin_x + (g.n_cols - 1) * g.spacing + margin;
    const double y_lo = g.origin_y - margin;
    const double y_hi = g.origin_y + (g.n_rows - 1) * g.spacing + margin;
    for (int row = 1; row <= g.n_rows; ++row) {
        const double y = g.node_position(row, 1).y();
        draw_line(cfg, terrain, noise, coverage, {x_lo, y, g.height}, {x_hi, y, g.height});
    }
    for (int col = 1; col <= g.n_cols; ++col) {
        const double x = g.node_position(1, col).x();
        draw_line(cfg, terrain, noise, coverage, {x, y_lo, g.height}, {x, y_hi, g.height});
    }

    // Dropped intersections: erase a disc around the node so no junction survives.
    const auto ground = project_grid_to_ground(g, terrain);
    const double erase = 2.5 * r.line_width_px;
    for (std::size_t k = 0; k < ground.size(); ++k) {
        if (!noise.dropped[k]) continue;
        const Eigen::Vector2d c = project(cfg.intrinsics, cfg.pose, ground[k]) + noise.jitter[k];
        for (int y = std::max(0, static_cast<int>(c.y() - erase) - 1);
             y <= std::min(r.height - 1, static_cast<int>(c.y() + erase) + 1); ++y) {
            for (int x = std::max(0, static_cast<int>(c.x() - erase) - 1);
                 x <= std::min(r.width - 1, static_cast<int>(c.x() + erase) + 1); ++x) {
                if (std::hypot(x - c.x(), y - c.y()) <= erase) coverage.at(x, y) = 0.0;
            }
        }
    }

    GrayImage texture(r.width, r.height, 0.0);
    if (cfg.noise.texture_amplitude > 0.0) {
        Rng rng(derive_seed(cfg.seed, kTextureStream));
        for (double& v : texture.samples) v = rng.normal();
        texture = gaussian_blur(texture, cfg.noise.texture_scale_px);
        double mean = 0.0;
        for (double v : texture.samples) mean += v;
        mean /= static_cast<double>(texture.samples.size());
        double var = 0.0;
        for (double v : texture.samples) var += (v - mean) * (v - mean);
        const double sd = std::sqrt(var / static_cast<double>(texture.samples.size()));
        for (double& v : texture.samples) v = sd > 0.0 ? (v - mean) / sd * cfg.noise.texture_amplitude : 0.0;
    }

    GrayImage img(r.width, r.height);
    Rng noise_rng(derive_seed(cfg.seed, kImageNoiseStream));
    for (int y = 0; y < r.height; ++y) {
        for (int x = 0; x < r.width; ++x) {
            const double light = r.background + texture.at(x, y) + r.line_level * coverage.at(x, y);
            double v = fov_gain(cfg, Eigen::Vector2d(x, y)) * light;
            if (cfg.noise.image_sigma > 0.0) v += cfg.noise.image_sigma * noise_rng.normal();
            img.at(x, y) = v;
        }
    }
    img.clamp_samples();
    return img;
}

GroundTruth emit_ground_truth(const SceneConfig& cfg, const Terrain& terrain) {
    cfg.validate();
    terrain.validate();
    const auto& g = cfg.grid;
    GroundTruth gt;
    gt.n_rows = g.n_rows;
    gt.n_cols = g.n_cols;
    gt.points = project_grid_to_ground(g, terrain);
    const NodeNoise noise = draw_node_noise(cfg);
    gt.dropped = noise.dropped;
    gt.height_map = HeightMap(g.n_rows, g.n_cols);
    const Eigen::Vector3d camera = cfg.pose.center();
    for (std::size_t k = 0; k < gt.points.size(); ++k) {
        const Eigen::Vector2d px = project(cfg.intrinsics, cfg.pose, gt.points[k]);
        gt.pixels.push_back(px);
        gt.observed_pixels.push_back(px + noise.jitter[k]);
        const bool inside = px.x() >= 0.0 && px.y() >= 0.0 && px.x() <= cfg.render.width - 1.0 &&
                            px.y() <= cfg.render.height - 1.0;
        gt.visible.push_back(inside && fov_gain(cfg, px) >= 0.5 &&
                             !occluded(terrain, gt.points[k], camera));
        gt.height_map.nodes[k] = gt.points[k];
        gt.height_map.valid[k] = true;
        gt.height_map.residual[k] = 0.0;
    }
    return gt;
}

GrayImage compensate_gain(const SceneConfig& cfg, const GrayImage& img, double min_gain) {
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double gain = fov_gain(cfg, Eigen::Vector2d(x, y));
            out.at(x, y) = gain > min_gain ? std::min(1.0, img.at(x, y) / gain) : 0.0;
        }
    }
    return out;
}

}  // namespace gridwarp
