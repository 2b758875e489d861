#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gridwarp/dtw.hpp"
#include "gridwarp/image.hpp"
#include "gridwarp/scene.hpp"

namespace gridwarp::csv {

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

// Row-major, headerless.
void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

// One value per line.
void write_values(const std::filesystem::path& path, const std::vector<double>& values);

// "i,j" per line, 1-based.
void write_path(const std::filesystem::path& path, const WarpPath& warp);

// "x,y" per line.
void write_points(const std::filesystem::path& path, const IntersectionSet& points);
IntersectionSet read_points(const std::filesystem::path& path);

// Header "row,col,X,Y,Z,valid,residual"; one line per node, row-major.
void write_heightmap(const std::filesystem::path& path, const HeightMap& map);

// Reads any CSV whose header names row, col, X, Y and Z; a "valid" column is
// optional (all valid when absent). Dimensions come from the largest indices.
HeightMap read_heightmap(const std::filesystem::path& path);

// Header "row,col,X,Y,Z,u,v,u_obs,v_obs,visible,dropped".
void write_ground_truth(const std::filesystem::path& path, const GroundTruth& gt);

// Splits on commas; skips blank lines. Lines whose first field is not
// numeric are treated as headers and skipped.
std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path);

double parse_double(const std::string& field, const std::string& context);

}  // namespace gridwarp::csv
