#include "gridwarp/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "gridwarp/errors.hpp"

namespace gridwarp {

void write_pgm(std::ostream& out, const GrayImage& img) {
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    std::string row(static_cast<std::size_t>(img.width), '\0');
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double v = std::clamp(img.at(x, y), 0.0, 1.0);
            row[static_cast<std::size_t>(x)] = static_cast<char>(std::lround(v * 255.0));
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw Error("failed to write PGM data");
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_pgm(out, img);
}

namespace {

int read_header_int(std::istream& in) {
    while (true) {
        const int c = in.peek();
        if (c == '#') {
            std::string comment;
            std::getline(in, comment);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = 0;
    if (!(in >> value)) throw InvalidInput("malformed PGM header");
    return value;
}

}  // namespace

GrayImage read_pgm(std::istream& in) {
    std::string magic(2, '\0');
    in.read(magic.data(), 2);
    if (!in || magic != "P5") throw InvalidInput("not a binary PGM (P5) stream");
    const int width = read_header_int(in);
    const int height = read_header_int(in);
    const int maxval = read_header_int(in);
    if (width < 1 || height < 1) throw InvalidInput("PGM dimensions must be positive");
    if (maxval < 1 || maxval > 255) throw InvalidInput("only 8-bit PGM is supported");
    in.get();  // single whitespace before the raster

    GrayImage img(width, height);
    std::string raster(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), '\0');
    in.read(raster.data(), static_cast<std::streamsize>(raster.size()));
    if (in.gcount() != static_cast<std::streamsize>(raster.size())) {
        throw InvalidInput("truncated PGM raster");
    }
    for (std::size_t k = 0; k < raster.size(); ++k) {
        img.samples[k] = static_cast<unsigned char>(raster[k]) / static_cast<double>(maxval);
    }
    return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open " + path.string());
    return read_pgm(in);
}

}  // namespace gridwarp
