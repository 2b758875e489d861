#include "gridwarp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "gridwarp/errors.hpp"

namespace gridwarp {

RunReport evaluate_heightmap(const HeightMap& estimate, const HeightMap& truth) {
    if (estimate.n_rows != truth.n_rows || estimate.n_cols != truth.n_cols) {
        throw InvalidInput("height map is " + std::to_string(estimate.n_rows) + "x" +
                           std::to_string(estimate.n_cols) + " but ground truth is " +
                           std::to_string(truth.n_rows) + "x" + std::to_string(truth.n_cols));
    }
    RunReport r;
    r.n_rows = truth.n_rows;
    r.n_cols = truth.n_cols;
    r.valid_nodes = estimate.valid_count();
    const std::size_t total = static_cast<std::size_t>(truth.n_rows * truth.n_cols);
    r.success_rate = total > 0 ? static_cast<double>(r.valid_nodes) / static_cast<double>(total) : 0.0;

    std::vector<double> abs_err;
    double sq = 0.0;
    for (std::size_t k = 0; k < total; ++k) {
        if (!estimate.valid[k] || !truth.valid[k]) continue;
        const double e = estimate.nodes[k].z() - truth.nodes[k].z();
        sq += e * e;
        abs_err.push_back(std::abs(e));
    }
    r.compared_nodes = abs_err.size();
    if (abs_err.empty()) {
        r.rmse = r.median_abs_error = r.max_abs_error = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    r.rmse = std::sqrt(sq / static_cast<double>(abs_err.size()));
    std::sort(abs_err.begin(), abs_err.end());
    const std::size_t n = abs_err.size();
    r.median_abs_error = n % 2 == 1 ? abs_err[n / 2] : 0.5 * (abs_err[n / 2 - 1] + abs_err[n / 2]);
    r.max_abs_error = abs_err.back();
    return r;
}

namespace {

nlohmann::json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json report_to_json(const RunReport& report, bool with_timings) {
    nlohmann::json j = {
        {"schema_version", report.schema_version},
        {"grid", {{"rows", report.n_rows}, {"cols", report.n_cols}}},
        {"valid_nodes", report.valid_nodes},
        {"compared_nodes", report.compared_nodes},
        {"rmse_m", number_or_null(report.rmse)},
        {"median_abs_error_m", number_or_null(report.median_abs_error)},
        {"max_abs_error_m", number_or_null(report.max_abs_error)},
        {"success_rate", report.success_rate},
        {"config_digest", report.config_digest},
    };
    if (with_timings) {
        nlohmann::json t = nlohmann::json::object();
        for (const auto& [stage, seconds] : report.timings) t[stage] = seconds;
        j["timings_s"] = t;
    }
    return j;
}

std::string report_to_text(const RunReport& report) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(4);
    const auto label = [&out](const std::string& name) -> std::ostream& {
        return out << std::left << std::setw(18) << name;
    };
    label("grid") << report.n_rows << " x " << report.n_cols << '\n';
    label("valid nodes") << report.valid_nodes << " (success rate " << report.success_rate << ")\n";
    label("rmse") << 1000.0 * report.rmse << " mm\n";
    label("median |error|") << 1000.0 * report.median_abs_error << " mm\n";
    label("max |error|") << 1000.0 * report.max_abs_error << " mm\n";
    for (const auto& [stage, seconds] : report.timings) label("time " + stage) << seconds << " s\n";
    if (!report.config_digest.empty()) label("config digest") << report.config_digest << '\n';
    return out.str();
}

GrayImage heightmap_image(const HeightMap& map, double z_lo, double z_hi, int cell_px) {
    if (cell_px < 1) throw InvalidInput("cell size must be >= 1");
    GrayImage img(map.n_cols * cell_px, map.n_rows * cell_px, 0.0);
    const double span = z_hi - z_lo;
    for (int r = 1; r <= map.n_rows; ++r) {
        for (int c = 1; c <= map.n_cols; ++c) {
            const std::size_t k = map.index(r, c);
            if (!map.valid[k]) continue;
            const double v = span > 0.0 ? std::clamp((map.nodes[k].z() - z_lo) / span, 0.0, 1.0) : 0.5;
            for (int y = 0; y < cell_px; ++y) {
                for (int x = 0; x < cell_px; ++x) img.at((c - 1) * cell_px + x, (r - 1) * cell_px + y) = v;
            }
        }
    }
    return img;
}

}  // namespace gridwarp
