#include "gridwarp/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "gridwarp/errors.hpp"

namespace gridwarp {

using nlohmann::json;

namespace {

// Typed accessors over one JSON object that track its key path and reject
// keys nobody asked for.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(display(), "expected an object");
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        if (!node_.contains(key)) throw ConfigError(child(key), "missing required field");
        return node_.at(key);
    }

    Section object(const std::string& key) { return Section(raw(key), child(key)); }

    double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(child(key), "expected a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) {
        return has(key) ? number(key) : (seen_.insert(key), fallback);
    }

    int integer(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(child(key), "expected an integer");
        return v.get<int>();
    }
    int integer(const std::string& key, int fallback) {
        return has(key) ? integer(key) : (seen_.insert(key), fallback);
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_number_unsigned()) throw ConfigError(child(key), "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_boolean()) throw ConfigError(child(key), "expected true or false");
        return v.get<bool>();
    }

    template <int N>
    Eigen::Matrix<double, N, 1> vector(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_array() || v.size() != N) {
            throw ConfigError(child(key), "expected an array of " + std::to_string(N) + " numbers");
        }
        Eigen::Matrix<double, N, 1> out;
        for (int k = 0; k < N; ++k) {
            if (!v[static_cast<std::size_t>(k)].is_number()) {
                throw ConfigError(child(key), "expected an array of " + std::to_string(N) + " numbers");
            }
            out[k] = v[static_cast<std::size_t>(k)].get<double>();
        }
        return out;
    }
    template <int N>
    Eigen::Matrix<double, N, 1> vector(const std::string& key, const Eigen::Matrix<double, N, 1>& fallback) {
        return has(key) ? vector<N>(key) : (seen_.insert(key), fallback);
    }

    void finish() const {
        for (const auto& [key, value] : node_.items()) {
            if (!seen_.contains(key)) throw ConfigError(child(key), "unknown field");
        }
    }

    std::string child(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }
    std::string display() const { return path_.empty() ? "<root>" : path_; }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigError(field, what);
}

json to_array(const Eigen::Vector2d& v) { return json::array({v.x(), v.y()}); }
json to_array(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Terrain parse_terrain(Section& s) {
    Terrain t;
    if (s.has("blocks")) {
        const json& arr = s.raw("blocks");
        require(arr.is_array(), s.child("blocks"), "expected an array");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            Section b(arr[k], s.child("blocks") + "[" + std::to_string(k) + "]");
            const Eigen::Vector2d x = b.vector<2>("x");
            const Eigen::Vector2d y = b.vector<2>("y");
            const double h = b.number("height_m");
            require(x[0] < x[1], b.child("x"), "lower bound must be below upper bound");
            require(y[0] < y[1], b.child("y"), "lower bound must be below upper bound");
            require(h >= 0.0, b.child("height_m"), "must be >= 0");
            b.finish();
            t.blocks.push_back({x[0], x[1], y[0], y[1], h});
        }
    }
    if (s.has("bumps")) {
        const json& arr = s.raw("bumps");
        require(arr.is_array(), s.child("bumps"), "expected an array");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            Section b(arr[k], s.child("bumps") + "[" + std::to_string(k) + "]");
            const Eigen::Vector2d c = b.vector<2>("center");
            const double radius = b.number("radius_m");
            const double amplitude = b.number("amplitude_m");
            require(radius > 0.0, b.child("radius_m"), "must be positive");
            require(amplitude >= 0.0, b.child("amplitude_m"), "must be >= 0");
            b.finish();
            t.bumps.push_back({c.x(), c.y(), radius, amplitude});
        }
    }
    s.finish();
    return t;
}

}  // namespace

SceneConfig config_from_json(const json& doc) {
    SceneConfig cfg;
    Section root(doc, "");
    cfg.seed = root.unsigned_integer("seed", cfg.seed);

    {
        Section g = root.object("grid");
        const int rows = g.integer("rows");
        const int cols = g.integer("cols");
        const double spacing = g.number("spacing_m");
        const double height = g.number("height_m");
        const Eigen::Vector2d center = g.vector<2>("center", Eigen::Vector2d::Zero());
        require(rows >= 2, g.child("rows"), "must be >= 2");
        require(cols >= 2, g.child("cols"), "must be >= 2");
        require(spacing > 0.0, g.child("spacing_m"), "must be positive");
        require(height > 0.0, g.child("height_m"), "must be positive");
        g.finish();
        cfg.grid = DisplayGrid::centered(rows, cols, spacing, height, center.x(), center.y());
    }
    {
        Section c = root.object("camera");
        cfg.intrinsics.fx = c.number("fx");
        cfg.intrinsics.fy = c.number("fy");
        cfg.intrinsics.cx = c.number("cx");
        cfg.intrinsics.cy = c.number("cy");
        cfg.intrinsics.skew = c.number("skew", 0.0);
        cfg.camera_position = c.vector<3>("position");
        cfg.camera_target = c.vector<3>("target");
        cfg.fov_limit_deg = c.number("fov_limit_deg", cfg.fov_limit_deg);
        require(cfg.intrinsics.fx > 0.0, c.child("fx"), "must be positive");
        require(cfg.intrinsics.fy > 0.0, c.child("fy"), "must be positive");
        require(cfg.fov_limit_deg > 0.0 && cfg.fov_limit_deg < 90.0, c.child("fov_limit_deg"),
                "must lie in (0, 90)");
        c.finish();
        try {
            cfg.pose = Pose::look_at(cfg.camera_position, cfg.camera_target);
        } catch (const GeometryError& e) {
            throw ConfigError(c.child("target"), e.what());
        }
    }
    {
        Section im = root.object("image");
        auto& r = cfg.render;
        r.width = im.integer("width");
        r.height = im.integer("height");
        r.line_width_px = im.number("line_width_px", r.line_width_px);
        r.samples_per_cell = im.integer("samples_per_cell", r.samples_per_cell);
        r.line_margin_cells = im.number("line_margin_cells", r.line_margin_cells);
        r.background = im.number("background", r.background);
        r.line_level = im.number("line_level", r.line_level);
        require(r.width >= 64, im.child("width"), "must be >= 64");
        require(r.height >= 64, im.child("height"), "must be >= 64");
        require(r.line_width_px > 0.0, im.child("line_width_px"), "must be positive");
        require(r.samples_per_cell >= 1, im.child("samples_per_cell"), "must be >= 1");
        require(r.line_margin_cells >= 0.0, im.child("line_margin_cells"), "must be >= 0");
        im.finish();
    }
    if (root.has("noise")) {
        Section n = root.object("noise");
        auto& z = cfg.noise;
        z.pixel_sigma_px = n.number("pixel_sigma_px", z.pixel_sigma_px);
        z.image_sigma = n.number("image_sigma", z.image_sigma);
        z.dropout_prob = n.number("dropout_prob", z.dropout_prob);
        z.texture_amplitude = n.number("texture_amplitude", z.texture_amplitude);
        z.texture_scale_px = n.number("texture_scale_px", z.texture_scale_px);
        require(z.pixel_sigma_px >= 0.0, n.child("pixel_sigma_px"), "must be >= 0");
        require(z.image_sigma >= 0.0, n.child("image_sigma"), "must be >= 0");
        require(z.dropout_prob >= 0.0 && z.dropout_prob <= 1.0, n.child("dropout_prob"),
                "must lie in [0, 1]");
        require(z.texture_amplitude >= 0.0, n.child("texture_amplitude"), "must be >= 0");
        require(z.texture_scale_px > 0.0, n.child("texture_scale_px"), "must be positive");
        n.finish();
    }
    if (root.has("pipeline")) {
        Section p = root.object("pipeline");
        auto& q = cfg.pipeline;
        q.blur_sigma_px = p.number("blur_sigma_px", q.blur_sigma_px);
        q.log_sigma_px = p.number("log_sigma_px", q.log_sigma_px);
        q.threshold = p.number("threshold", q.threshold);
        q.merge_radius_px = p.number("merge_radius_px", q.merge_radius_px);
        q.refine_radius_px = p.number("refine_radius_px", q.refine_radius_px);
        q.max_residual_m = p.number("max_residual_m", q.max_residual_m);
        q.gain_compensation = p.boolean("gain_compensation", q.gain_compensation);
        require(q.blur_sigma_px > 0.0, p.child("blur_sigma_px"), "must be positive");
        require(q.log_sigma_px > 0.0, p.child("log_sigma_px"), "must be positive");
        require(q.threshold > 0.0 && q.threshold < 1.0, p.child("threshold"), "must lie in (0, 1)");
        require(q.merge_radius_px >= 1.0, p.child("merge_radius_px"), "must be >= 1");
        require(q.refine_radius_px > 0.0, p.child("refine_radius_px"), "must be positive");
        require(q.max_residual_m > 0.0, p.child("max_residual_m"), "must be positive");
        p.finish();
    }
    if (root.has("terrain")) {
        Section t = root.object("terrain");
        cfg.terrain = parse_terrain(t);
    }
    root.finish();

    try {
        cfg.validate();
    } catch (const Error& e) {
        throw ConfigError("terrain", e.what());
    }
    return cfg;
}

json config_to_json(const SceneConfig& cfg) {
    const auto& g = cfg.grid;
    const Eigen::Vector2d center(g.origin_x + 0.5 * (g.n_cols - 1) * g.spacing,
                                 g.origin_y + 0.5 * (g.n_rows - 1) * g.spacing);
    json blocks = json::array();
    for (const auto& b : cfg.terrain.blocks) {
        blocks.push_back({{"x", {b.x0, b.x1}}, {"y", {b.y0, b.y1}}, {"height_m", b.height}});
    }
    json bumps = json::array();
    for (const auto& b : cfg.terrain.bumps) {
        bumps.push_back({{"center", {b.cx, b.cy}}, {"radius_m", b.radius}, {"amplitude_m", b.amplitude}});
    }
    return {
        {"seed", cfg.seed},
        {"grid",
         {{"rows", g.n_rows}, {"cols", g.n_cols}, {"spacing_m", g.spacing}, {"height_m", g.height},
          {"center", to_array(center)}}},
        {"camera",
         {{"fx", cfg.intrinsics.fx},
          {"fy", cfg.intrinsics.fy},
          {"cx", cfg.intrinsics.cx},
          {"cy", cfg.intrinsics.cy},
          {"skew", cfg.intrinsics.skew},
          {"position", to_array(cfg.camera_position)},
          {"target", to_array(cfg.camera_target)},
          {"fov_limit_deg", cfg.fov_limit_deg}}},
        {"image",
         {{"width", cfg.render.width},
          {"height", cfg.render.height},
          {"line_width_px", cfg.render.line_width_px},
          {"samples_per_cell", cfg.render.samples_per_cell},
          {"line_margin_cells", cfg.render.line_margin_cells},
          {"background", cfg.render.background},
          {"line_level", cfg.render.line_level}}},
        {"noise",
         {{"pixel_sigma_px", cfg.noise.pixel_sigma_px},
          {"image_sigma", cfg.noise.image_sigma},
          {"dropout_prob", cfg.noise.dropout_prob},
          {"texture_amplitude", cfg.noise.texture_amplitude},
          {"texture_scale_px", cfg.noise.texture_scale_px}}},
        {"pipeline",
         {{"blur_sigma_px", cfg.pipeline.blur_sigma_px},
          {"log_sigma_px", cfg.pipeline.log_sigma_px},
          {"threshold", cfg.pipeline.threshold},
          {"merge_radius_px", cfg.pipeline.merge_radius_px},
          {"refine_radius_px", cfg.pipeline.refine_radius_px},
          {"max_residual_m", cfg.pipeline.max_residual_m},
          {"gain_compensation", cfg.pipeline.gain_compensation}}},
        {"terrain", {{"blocks", blocks}, {"bumps", bumps}}},
    };
}

SceneConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(doc);
}

void save_config(const SceneConfig& cfg, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << config_to_json(cfg).dump(2) << '\n';
}

std::string config_digest(const SceneConfig& cfg) {
    const std::string text = config_to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace gridwarp
