#pragma once

#include <filesystem>
#include <iosfwd>

#include "gridwarp/image.hpp"

namespace gridwarp {

// 8-bit binary PGM (P5). Samples are quantized as round(255 * clamp(v, 0, 1)).
void write_pgm(std::ostream& out, const GrayImage& img);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

// Accepts P5 with maxval <= 255 and '#' comments in the header. Samples are
// scaled to [0, 1] by maxval.
GrayImage read_pgm(std::istream& in);
GrayImage read_pgm(const std::filesystem::path& path);

}  // namespace gridwarp
