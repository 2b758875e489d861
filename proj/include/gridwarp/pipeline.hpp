#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gridwarp/geometry.hpp"
#include "gridwarp/grid_match.hpp"
#include "gridwarp/image.hpp"
#include "gridwarp/scene.hpp"

namespace gridwarp {

// Intermediate products of intersection extraction, kept for diagnostics.
struct Extraction {
    GrayImage blurred;
    GrayImage enhanced;
    BinaryImage skeleton;
    IntersectionSet raw;      // skeleton junction centroids
    IntersectionSet points;   // after subpixel refinement
};

// blur -> LoG -> binarize -> skeletonize -> junctions -> refine.
Extraction extract_intersections(const GrayImage& img, const PipelineConfig& p);

// Where every display node would appear if the ground were the plane z = 0.
std::vector<Eigen::Vector2d> predicted_pixels(const SceneConfig& cfg);

// Grid matching on extracted profiles. Columns are aligned on their
// abscissae and rows on the transposed ordinate grid; both grids are first
// rescaled to their own extent, so the alignment sees the grid's shape and
// not where it sits in the image.
GridMatchResult match_profiles(const ColumnProfiles& a, const ColumnProfiles& b,
                               const MatchOptions& options = {});

enum class Matcher { dtw, nearest };

struct ReconstructOptions {
    Matcher matcher = Matcher::dtw;
    MatchOptions match;
};

// Display node -> observed point. Nodes without a usable correspondence are absent.
struct Correspondences {
    std::vector<GridMatch> matches;
    std::vector<int> point_index;  // parallel to `matches`
};

// Grid matching between the predicted flat-ground grid and the observed one.
// `predicted` must be built from predicted_pixels, so its slots index display
// nodes row-major. A node is matched only when both mappings land within 0.25
// of an integer slot that holds a detected (not padded) point claimed by no
// other node.
Correspondences correspond_by_grid(const GridMatchResult& match, const ColumnProfiles& predicted,
                                   const ColumnProfiles& observed, const IntersectionSet& points,
                                   int n_cols);

// Baseline without order regularization: each point goes to the nearest
// predicted node; when several points claim a node the closest one wins.
Correspondences correspond_nearest(const std::vector<Eigen::Vector2d>& predicted, int n_rows,
                                   int n_cols, const IntersectionSet& points);

// Gates used by the pipeline: residual bound from the config and heights
// between -h and h.
TriangulationGates pipeline_gates(const SceneConfig& cfg);

using StageTimings = std::vector<std::pair<std::string, double>>;  // seconds

struct Reconstruction {
    Extraction extraction;
    ColumnProfiles predicted;
    ColumnProfiles observed;
    GridMatchResult match;  // empty for the nearest-neighbour matcher
    Correspondences correspondences;
    HeightMap height_map;
    StageTimings timings;
};

// Full image -> HeightMap pipeline. Throws ExtractionFailure when the image
// does not contain enough grid structure.
Reconstruction reconstruct(const GrayImage& img, const SceneConfig& cfg,
                           const ReconstructOptions& options = {});

}  // namespace gridwarp
