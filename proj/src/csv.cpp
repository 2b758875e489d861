#include "gridwarp/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "gridwarp/errors.hpp"

namespace gridwarp::csv {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    return out;
}

bool looks_numeric(const std::string& s) {
    if (s.empty()) return false;
    const char c = s.front();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.' ||
           s == "nan" || s == "inf";
}

}  // namespace

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c > 0) out << ',';
            out << format_double(m(r, c));
        }
        out << '\n';
    }
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    auto out = open_out(path);
    write_matrix(out, m);
}

double parse_double(const std::string& field, const std::string& context) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    while (first < last && std::isspace(static_cast<unsigned char>(*first))) ++first;
    while (last > first && std::isspace(static_cast<unsigned char>(*(last - 1)))) --last;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw InvalidInput(context + ": cannot parse '" + field + "' as a number");
    }
    return v;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!fields.empty() && !looks_numeric(fields.front())) continue;
        rows.push_back(std::move(fields));
    }
    return rows;
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
    const auto rows = read_rows(path);
    if (rows.empty()) return {};
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != rows.front().size()) {
            throw InvalidInput(path.string() + ": ragged matrix row " + std::to_string(r + 1));
        }
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                parse_double(rows[r][c], path.string());
        }
    }
    return m;
}

void write_values(const std::filesystem::path& path, const std::vector<double>& values) {
    auto out = open_out(path);
    for (double v : values) out << format_double(v) << '\n';
}

void write_path(const std::filesystem::path& path, const WarpPath& warp) {
    auto out = open_out(path);
    for (const auto& s : warp.steps) out << s.i << ',' << s.j << '\n';
}

void write_points(const std::filesystem::path& path, const IntersectionSet& points) {
    auto out = open_out(path);
    for (const auto& p : points) out << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

IntersectionSet read_points(const std::filesystem::path& path) {
    IntersectionSet points;
    for (const auto& row : read_rows(path)) {
        if (row.size() < 2) throw InvalidInput(path.string() + ": expected x,y");
        points.push_back({parse_double(row[0], path.string()), parse_double(row[1], path.string())});
    }
    return points;
}

void write_heightmap(const std::filesystem::path& path, const HeightMap& map) {
    auto out = open_out(path);
    out << "row,col,X,Y,Z,valid,residual\n";
    for (int r = 1; r <= map.n_rows; ++r) {
        for (int c = 1; c <= map.n_cols; ++c) {
            const std::size_t k = map.index(r, c);
            const Eigen::Vector3d& p = map.nodes[k];
            out << r << ',' << c << ',' << format_double(p.x()) << ',' << format_double(p.y()) << ','
                << format_double(p.z()) << ',' << (map.valid[k] ? 1 : 0) << ','
                << format_double(map.residual[k]) << '\n';
        }
    }
}

HeightMap read_heightmap(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) header.push_back(field);
    }
    const auto column = [&](const std::string& name) {
        for (std::size_t k = 0; k < header.size(); ++k) {
            if (header[k] == name) return static_cast<int>(k);
        }
        return -1;
    };
    const int i_row = column("row"), i_col = column("col");
    const int i_x = column("X"), i_y = column("Y"), i_z = column("Z");
    const int i_valid = column("valid");
    if (i_row < 0 || i_col < 0 || i_x < 0 || i_y < 0 || i_z < 0) {
        throw InvalidInput(path.string() + ": header must name row, col, X, Y and Z");
    }

    struct Entry {
        int row, col;
        Eigen::Vector3d p;
        bool valid;
    };
    std::vector<Entry> entries;
    int n_rows = 0, n_cols = 0;
    const std::string ctx = path.string();
    for (const auto& fields : read_rows(path)) {
        const auto get = [&](int k) {
            if (k >= static_cast<int>(fields.size())) throw InvalidInput(ctx + ": short line");
            return parse_double(fields[static_cast<std::size_t>(k)], ctx);
        };
        Entry e{static_cast<int>(get(i_row)), static_cast<int>(get(i_col)),
                Eigen::Vector3d(get(i_x), get(i_y), get(i_z)), i_valid < 0 || get(i_valid) != 0.0};
        if (e.row < 1 || e.col < 1) throw InvalidInput(ctx + ": node indices are 1-based");
        n_rows = std::max(n_rows, e.row);
        n_cols = std::max(n_cols, e.col);
        entries.push_back(e);
    }
    HeightMap map(n_rows, n_cols);
    for (const auto& e : entries) {
        const std::size_t k = map.index(e.row, e.col);
        map.nodes[k] = e.p;
        map.valid[k] = e.valid && e.p.allFinite();
        if (map.valid[k]) map.residual[k] = 0.0;
    }
    return map;
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& gt) {
    auto out = open_out(path);
    out << "row,col,X,Y,Z,u,v,u_obs,v_obs,visible,dropped\n";
    for (int r = 1; r <= gt.n_rows; ++r) {
        for (int c = 1; c <= gt.n_cols; ++c) {
            const std::size_t k = gt.index(r, c);
            const auto& p = gt.points[k];
            out << r << ',' << c << ',' << format_double(p.x()) << ',' << format_double(p.y()) << ','
                << format_double(p.z()) << ',' << format_double(gt.pixels[k].x()) << ','
                << format_double(gt.pixels[k].y()) << ',' << format_double(gt.observed_pixels[k].x())
                << ',' << format_double(gt.observed_pixels[k].y()) << ',' << (gt.visible[k] ? 1 : 0)
                << ',' << (gt.dropped[k] ? 1 : 0) << '\n';
        }
    }
}

}  // namespace gridwarp::csv
