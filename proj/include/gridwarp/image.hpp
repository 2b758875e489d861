#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "gridwarp/grid_match.hpp"

namespace gridwarp {

// Row-major grayscale image. Pixel (x, y) has its center at coordinate (x, y).
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> samples;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0);

    double& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }

    // Clamp-to-edge read.
    double clamped(int x, int y) const;
    void clamp_samples();
};

struct BinaryImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BinaryImage() = default;
    BinaryImage(int w, int h);

    bool on(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
    // Out-of-bounds reads are background.
    bool on_or_off(int x, int y) const;
    void set(int x, int y, bool v) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    std::size_t count() const;

    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

using IntersectionSet = std::vector<Point2>;

// Normalized, truncated Gaussian taps for offsets -r..r with r = ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

GrayImage gaussian_blur(const GrayImage& img, double sigma);

// Negated 4-neighbour Laplacian of the Gaussian-blurred image, so bright
// ridges peak high. Affine min-max rescale to [0, 1]; a flat response maps
// to 0.5 everywhere.
GrayImage log_enhance(const GrayImage& img, double sigma);

BinaryImage binarize(const GrayImage& img, double threshold);

// Zhang-Suen thinning to a fixpoint, followed by removal of staircase
// corner pixels that are redundant under 8-connectivity. Both passes repeat
// until neither changes the image, which makes the operation idempotent.
BinaryImage skeletonize(const BinaryImage& bin);

// Number of foreground pixels in the 8-neighbourhood.
int neighbour_count(const BinaryImage& img, int x, int y);

// Skeleton pixels with >= 3 neighbours are clustered by single linkage
// within merge_radius; each cluster yields its centroid. Clusters whose
// centroids end up within merge_radius of each other are merged again.
IntersectionSet detect_intersections(const BinaryImage& skel, double merge_radius);

// Iterated intensity-weighted centroid (mean shift) of each point on `img`
// within a disc of `radius` pixels. Weights are intensities above the window's
// 25th percentile.
IntersectionSet refine_intersections(const GrayImage& img, const IntersectionSet& points,
                                     double radius, int iterations = 12);

// Column profiles built from detected intersections.
struct ColumnProfiles {
    ColumnGrid grid;        // n_rows x n_cols, y / image_height
    Eigen::MatrixXd abscissa;  // x in pixels per slot, padded the same way
    Eigen::MatrixXi slot;   // index into the input points, or -1 where padded
    std::vector<double> column_x;  // cluster centers, ascending
};

// Points are grouped into n_cols columns by 1D k-means on x (seeded at
// uniform quantiles) and into row ranks by a monotone assignment against
// n_rows global row centers (1D k-means on y). Unfilled ranks are linearly
// interpolated from assigned neighbours. Throws ExtractionFailure when there
// are fewer points than columns or a column ends up empty.
ColumnProfiles intersections_to_column_profiles(const IntersectionSet& points, int n_cols,
                                                int n_rows, int image_height);

// 1D k-means with quantile seeding. Returns (sorted centers, label per value).
struct Clustering1D {
    std::vector<double> centers;
    std::vector<int> labels;
};
Clustering1D kmeans_1d(const std::vector<double>& values, int k);

}  // namespace gridwarp
