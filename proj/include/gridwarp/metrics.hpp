#pragma once

#include <json.hpp>
#include <string>

#include "gridwarp/geometry.hpp"
#include "gridwarp/image.hpp"
#include "gridwarp/pipeline.hpp"

namespace gridwarp {

inline constexpr int kReportSchemaVersion = 1;

struct RunReport {
    int schema_version = kReportSchemaVersion;
    int n_rows = 0;
    int n_cols = 0;
    std::size_t valid_nodes = 0;
    std::size_t compared_nodes = 0;  // valid in both maps
    double rmse = 0.0;               // m, over compared nodes
    double median_abs_error = 0.0;   // m
    double max_abs_error = 0.0;      // m
    double success_rate = 0.0;       // valid / total
    StageTimings timings;
    std::string config_digest;
};

// Height (Z) errors of `estimate` against `truth` over nodes valid in both.
// Throws InvalidInput when the grid dimensions differ. With no comparable
// node the error fields are NaN.
RunReport evaluate_heightmap(const HeightMap& estimate, const HeightMap& truth);

// Wall-clock fields are omitted when `with_timings` is false, which makes the
// output a deterministic function of the inputs.
nlohmann::json report_to_json(const RunReport& report, bool with_timings = true);
std::string report_to_text(const RunReport& report);

// Z mapped linearly from [z_lo, z_hi] to [0, 1], one pixel per node scaled
// up by `cell_px`; invalid nodes are black.
GrayImage heightmap_image(const HeightMap& map, double z_lo, double z_hi, int cell_px = 8);

}  // namespace gridwarp
