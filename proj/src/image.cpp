#include "gridwarp/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gridwarp/errors.hpp"

namespace gridwarp {

GrayImage::GrayImage(int w, int h, double fill) : width(w), height(h) {
    if (w < 1 || h < 1) throw InvalidInput("image dimensions must be positive");
    samples.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
}

double GrayImage::clamped(int x, int y) const {
    return at(std::clamp(x, 0, width - 1), std::clamp(y, 0, height - 1));
}

void GrayImage::clamp_samples() {
    for (double& v : samples) v = std::clamp(v, 0.0, 1.0);
}

BinaryImage::BinaryImage(int w, int h) : width(w), height(h) {
    if (w < 1 || h < 1) throw InvalidInput("image dimensions must be positive");
    bits.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
}

bool BinaryImage::on_or_off(int x, int y) const {
    if (x < 0 || y < 0 || x >= width || y >= height) return false;
    return on(x, y);
}

std::size_t BinaryImage::count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw InvalidInput("gaussian sigma must be positive, got " + std::to_string(sigma));
    }
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        const double w = std::exp(-0.5 * (k * k) / (sigma * sigma));
        taps[static_cast<std::size_t>(k + radius)] = w;
        sum += w;
    }
    for (double& w : taps) w /= sum;
    return taps;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    const auto taps = gaussian_kernel(sigma);
    const int radius = static_cast<int>(taps.size() / 2);

    GrayImage tmp(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += taps[static_cast<std::size_t>(k + radius)] * img.clamped(x + k, y);
            }
            tmp.at(x, y) = acc;
        }
    }
    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += taps[static_cast<std::size_t>(k + radius)] * tmp.clamped(x, y + k);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

GrayImage log_enhance(const GrayImage& img, double sigma) {
    const GrayImage blurred = gaussian_blur(img, sigma);
    GrayImage response(img.width, img.height);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double lap = blurred.clamped(x + 1, y) + blurred.clamped(x - 1, y) +
                               blurred.clamped(x, y + 1) + blurred.clamped(x, y - 1) -
                               4.0 * blurred.at(x, y);
            const double r = -lap;
            response.at(x, y) = r;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    }
    // Rounding in the blur leaves ~1e-16 ripple on flat input.
    if (hi - lo <= 1e-12) {
        std::fill(response.samples.begin(), response.samples.end(), 0.5);
        return response;
    }
    const double scale = 1.0 / (hi - lo);
    for (double& v : response.samples) v = (v - lo) * scale;
    return response;
}

BinaryImage binarize(const GrayImage& img, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw InvalidInput("binarize threshold must lie in (0, 1), got " + std::to_string(threshold));
    }
    BinaryImage out(img.width, img.height);
    for (std::size_t k = 0; k < img.samples.size(); ++k) {
        out.bits[k] = img.samples[k] >= threshold ? 1 : 0;
    }
    return out;
}

int neighbour_count(const BinaryImage& img, int x, int y) {
    int n = 0;
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            if ((dx != 0 || dy != 0) && img.on_or_off(x + dx, y + dy)) ++n;
        }
    }
    return n;
}

namespace {

// Clockwise from north: P2..P9 in Zhang-Suen notation.
constexpr std::array<int, 8> kDx{0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDy{-1, -1, 0, 1, 1, 1, 0, -1};

std::array<bool, 8> ring(const BinaryImage& img, int x, int y) {
    std::array<bool, 8> p{};
    for (std::size_t k = 0; k < 8; ++k) p[k] = img.on_or_off(x + kDx[k], y + kDy[k]);
    return p;
}

bool zhang_suen_pass(BinaryImage& img, int subiteration) {
    std::vector<std::size_t> doomed;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (!img.on(x, y)) continue;
            const auto p = ring(img, x, y);
            const int b = static_cast<int>(std::count(p.begin(), p.end(), true));
            if (b < 2 || b > 6) continue;
            int a = 0;
            for (std::size_t k = 0; k < 8; ++k) {
                if (!p[k] && p[(k + 1) % 8]) ++a;
            }
            if (a != 1) continue;
            // p[0]=N(P2) p[2]=E(P4) p[4]=S(P6) p[6]=W(P8)
            const bool n = p[0], e = p[2], s = p[4], w = p[6];
            if (subiteration == 0) {
                if ((n && e && s) || (e && s && w)) continue;
            } else {
                if ((n && e && w) || (n && s && w)) continue;
            }
            doomed.push_back(static_cast<std::size_t>(y) * img.width + x);
        }
    }
    for (auto k : doomed) img.bits[k] = 0;
    return !doomed.empty();
}

// A pixel whose only neighbours are a right-angle pair of 4-neighbours (plus
// diagonals hugging that pair) is a staircase corner; its two 4-neighbours
// already touch diagonally, so it can go without splitting the stroke.
bool staircase_pass(BinaryImage& img) {
    bool changed = false;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (!img.on(x, y)) continue;
            const auto p = ring(img, x, y);
            for (std::size_t k = 0; k < 8; k += 2) {
                const std::size_t a = k;                // 4-neighbour
                const std::size_t between = (k + 1) % 8;  // diagonal between a and b
                const std::size_t b = (k + 2) % 8;      // next 4-neighbour
                const std::size_t opp_a = (k + 4) % 8;
                const std::size_t opp_b = (k + 6) % 8;
                const std::size_t opp_diag = (k + 5) % 8;
                if (p[a] && p[b] && !p[between] && !p[opp_a] && !p[opp_b] && !p[opp_diag]) {
                    img.set(x, y, false);
                    changed = true;
                    break;
                }
            }
        }
    }
    return changed;
}

}  // namespace

BinaryImage skeletonize(const BinaryImage& bin) {
    BinaryImage img = bin;
    bool changed = true;
    while (changed) {
        changed = false;
        while (true) {
            const bool first = zhang_suen_pass(img, 0);
            const bool second = zhang_suen_pass(img, 1);
            if (!first && !second) break;
            changed = true;
        }
        if (staircase_pass(img)) changed = true;
    }
    return img;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int v) {
        while (parent[static_cast<std::size_t>(v)] != v) {
            parent[static_cast<std::size_t>(v)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
            v = parent[static_cast<std::size_t>(v)];
        }
        return v;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

struct Cluster {
    double sx = 0.0;
    double sy = 0.0;
    double n = 0.0;
    Point2 centroid() const { return {sx / n, sy / n}; }
};

}  // namespace

IntersectionSet detect_intersections(const BinaryImage& skel, double merge_radius) {
    if (!(merge_radius >= 1.0)) throw InvalidInput("merge_radius must be >= 1");

    std::vector<Point2> candidates;
    for (int y = 0; y < skel.height; ++y) {
        for (int x = 0; x < skel.width; ++x) {
            if (skel.on(x, y) && neighbour_count(skel, x, y) >= 3) {
                candidates.push_back({static_cast<double>(x), static_cast<double>(y)});
            }
        }
    }
    if (candidates.empty()) return {};

    const double r2 = merge_radius * merge_radius;
    UnionFind uf(candidates.size());
    // Candidates are in raster order, so the inner scan can stop once the row
    // gap exceeds the radius.
    for (std::size_t a = 0; a < candidates.size(); ++a) {
        for (std::size_t b = a + 1; b < candidates.size(); ++b) {
            const double dy = candidates[b].y - candidates[a].y;
            if (dy > merge_radius) break;
            const double dx = candidates[b].x - candidates[a].x;
            if (dx * dx + dy * dy <= r2) uf.unite(static_cast<int>(a), static_cast<int>(b));
        }
    }

    std::vector<Cluster> clusters;
    std::vector<int> cluster_of(candidates.size(), -1);
    for (std::size_t a = 0; a < candidates.size(); ++a) {
        const int root = uf.find(static_cast<int>(a));
        auto& slot = cluster_of[static_cast<std::size_t>(root)];
        if (slot < 0) {
            slot = static_cast<int>(clusters.size());
            clusters.emplace_back();
        }
        auto& c = clusters[static_cast<std::size_t>(slot)];
        c.sx += candidates[a].x;
        c.sy += candidates[a].y;
        c.n += 1.0;
    }

    // Merge clusters whose centroids are still within the radius.
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t a = 0; a < clusters.size() && !merged; ++a) {
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                const Point2 pa = clusters[a].centroid();
                const Point2 pb = clusters[b].centroid();
                const double dx = pa.x - pb.x;
                const double dy = pa.y - pb.y;
                if (dx * dx + dy * dy < r2) {
                    clusters[a].sx += clusters[b].sx;
                    clusters[a].sy += clusters[b].sy;
                    clusters[a].n += clusters[b].n;
                    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(b));
                    merged = true;
                    break;
                }
            }
        }
    }

    IntersectionSet points;
    points.reserve(clusters.size());
    for (const auto& c : clusters) points.push_back(c.centroid());
    return points;
}

IntersectionSet refine_intersections(const GrayImage& img, const IntersectionSet& points,
                                     double radius, int iterations) {
    if (!(radius > 0.0)) throw InvalidInput("refine radius must be positive");
    IntersectionSet refined;
    refined.reserve(points.size());
    const int r = static_cast<int>(std::ceil(radius));
    std::vector<double> window;
    for (Point2 p : points) {
        for (int it = 0; it < iterations; ++it) {
            const int cx = static_cast<int>(std::lround(p.x));
            const int cy = static_cast<int>(std::lround(p.y));
            window.clear();
            for (int y = cy - r; y <= cy + r; ++y) {
                for (int x = cx - r; x <= cx + r; ++x) {
                    const double dx = x - p.x;
                    const double dy = y - p.y;
                    if (dx * dx + dy * dy <= radius * radius) window.push_back(img.clamped(x, y));
                }
            }
            if (window.empty()) break;
            auto q = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 4);
            std::nth_element(window.begin(), q, window.end());
            const double floor_level = *q;

            double sw = 0.0, sx = 0.0, sy = 0.0;
            for (int y = cy - r; y <= cy + r; ++y) {
                for (int x = cx - r; x <= cx + r; ++x) {
                    const double dx = x - p.x;
                    const double dy = y - p.y;
                    if (dx * dx + dy * dy > radius * radius) continue;
                    const double w = img.clamped(x, y) - floor_level;
                    if (w <= 0.0) continue;
                    sw += w;
                    sx += w * x;
                    sy += w * y;
                }
            }
            if (sw <= 0.0) break;
            const Point2 next{std::clamp(sx / sw, 0.0, img.width - 1.0),
                              std::clamp(sy / sw, 0.0, img.height - 1.0)};
            const double shift = std::hypot(next.x - p.x, next.y - p.y);
            p = next;
            if (shift < 1e-4) break;
        }
        refined.push_back(p);
    }
    return refined;
}

Clustering1D kmeans_1d(const std::vector<double>& values, int k) {
    if (k < 1) throw InvalidInput("kmeans_1d: k must be positive");
    if (values.size() < static_cast<std::size_t>(k)) {
        throw InvalidInput("kmeans_1d: fewer values than clusters");
    }
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    Clustering1D out;
    out.centers.resize(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        const auto idx = static_cast<std::size_t>((c + 0.5) * static_cast<double>(n) / k);
        out.centers[static_cast<std::size_t>(c)] = sorted[std::min(idx, n - 1)];
    }

    out.labels.assign(values.size(), -1);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (std::size_t v = 0; v < values.size(); ++v) {
            int best = 0;
            double best_d = std::abs(values[v] - out.centers[0]);
            for (int c = 1; c < k; ++c) {
                const double d = std::abs(values[v] - out.centers[static_cast<std::size_t>(c)]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (out.labels[v] != best) {
                out.labels[v] = best;
                changed = true;
            }
        }
        std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
        std::vector<int> count(static_cast<std::size_t>(k), 0);
        for (std::size_t v = 0; v < values.size(); ++v) {
            sum[static_cast<std::size_t>(out.labels[v])] += values[v];
            ++count[static_cast<std::size_t>(out.labels[v])];
        }
        for (std::size_t c = 0; c < out.centers.size(); ++c) {
            if (count[c] > 0) out.centers[c] = sum[c] / count[c];
        }
        if (!changed) break;
    }
    return out;
}

namespace {

// Monotone assignment of ascending ys to ranks. Dropping a point costs
// `skip_cost`; leaving a rank empty is free. Returns rank -> point (or -1).
std::vector<int> assign_ranks(const std::vector<double>& ys, const std::vector<double>& centers,
                              double skip_cost) {
    const std::size_t np = ys.size();
    const std::size_t nr = centers.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> m((np + 1) * (nr + 1), inf);
    auto at = [&](std::size_t a, std::size_t b) -> double& { return m[a * (nr + 1) + b]; };
    for (std::size_t b = 0; b <= nr; ++b) at(0, b) = 0.0;
    for (std::size_t a = 1; a <= np; ++a) {
        at(a, 0) = at(a - 1, 0) + skip_cost;
        for (std::size_t b = 1; b <= nr; ++b) {
            const double match = at(a - 1, b - 1) + std::abs(ys[a - 1] - centers[b - 1]);
            at(a, b) = std::min({match, at(a - 1, b) + skip_cost, at(a, b - 1)});
        }
    }
    std::vector<int> rank_to_point(nr, -1);
    std::size_t a = np;
    std::size_t b = nr;
    while (a > 0 && b > 0) {
        const double match = at(a - 1, b - 1) + std::abs(ys[a - 1] - centers[b - 1]);
        if (at(a, b) == match) {
            rank_to_point[b - 1] = static_cast<int>(a - 1);
            --a;
            --b;
        } else if (at(a, b) == at(a - 1, b) + skip_cost) {
            --a;
        } else {
            --b;
        }
    }
    return rank_to_point;
}

}  // namespace

ColumnProfiles intersections_to_column_profiles(const IntersectionSet& points, int n_cols,
                                                int n_rows, int image_height) {
    if (n_cols < 1 || n_rows < 1) throw InvalidInput("profile grid dimensions must be positive");
    if (image_height < 1) throw InvalidInput("image height must be positive");
    if (points.size() < static_cast<std::size_t>(n_cols)) {
        throw ExtractionFailure("found " + std::to_string(points.size()) +
                                " intersections, fewer than the " + std::to_string(n_cols) +
                                " grid columns");
    }
    if (points.size() < static_cast<std::size_t>(n_rows)) {
        throw ExtractionFailure("found " + std::to_string(points.size()) +
                                " intersections, fewer than the " + std::to_string(n_rows) +
                                " grid rows");
    }

    std::vector<double> xs, ys;
    xs.reserve(points.size());
    ys.reserve(points.size());
    for (const auto& p : points) {
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    const Clustering1D columns = kmeans_1d(xs, n_cols);
    const Clustering1D rows = kmeans_1d(ys, n_rows);

    double row_gap = static_cast<double>(image_height);
    if (n_rows > 1) {
        std::vector<double> gaps;
        for (std::size_t r = 1; r < rows.centers.size(); ++r) {
            gaps.push_back(rows.centers[r] - rows.centers[r - 1]);
        }
        std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2),
                         gaps.end());
        row_gap = gaps[gaps.size() / 2];
    }

    ColumnProfiles out;
    out.grid.resize(n_rows, n_cols);
    out.abscissa.resize(n_rows, n_cols);
    out.slot = Eigen::MatrixXi::Constant(n_rows, n_cols, -1);
    out.column_x = columns.centers;

    for (int c = 0; c < n_cols; ++c) {
        std::vector<int> members;
        for (std::size_t k = 0; k < points.size(); ++k) {
            if (columns.labels[k] == c) members.push_back(static_cast<int>(k));
        }
        if (members.empty()) {
            throw ExtractionFailure("grid column " + std::to_string(c + 1) + " has no intersections");
        }
        std::stable_sort(members.begin(), members.end(), [&](int a, int b) {
            return points[static_cast<std::size_t>(a)].y < points[static_cast<std::size_t>(b)].y;
        });
        std::vector<double> member_y;
        for (int k : members) member_y.push_back(points[static_cast<std::size_t>(k)].y);

        const auto ranks = assign_ranks(member_y, rows.centers, 0.5 * row_gap);
        std::vector<double> value(static_cast<std::size_t>(n_rows),
                                  std::numeric_limits<double>::quiet_NaN());
        for (int r = 0; r < n_rows; ++r) {
            const int local = ranks[static_cast<std::size_t>(r)];
            if (local < 0) continue;
            value[static_cast<std::size_t>(r)] = member_y[static_cast<std::size_t>(local)];
            out.slot(r, c) = members[static_cast<std::size_t>(local)];
        }

        // Pad unfilled ranks: interpolate between assigned neighbours, or
        // carry the nearest assigned offset from the row centers at the ends.
        for (int r = 0; r < n_rows; ++r) {
            if (!std::isnan(value[static_cast<std::size_t>(r)])) continue;
            int lo = r - 1;
            while (lo >= 0 && out.slot(lo, c) < 0) --lo;
            int hi = r + 1;
            while (hi < n_rows && out.slot(hi, c) < 0) ++hi;
            const auto center = [&](int k) { return rows.centers[static_cast<std::size_t>(k)]; };
            const auto val = [&](int k) { return value[static_cast<std::size_t>(k)]; };
            const auto x_at = [&](int k) { return points[static_cast<std::size_t>(out.slot(k, c))].x; };
            double y;
            double x;
            if (lo >= 0 && hi < n_rows) {
                const double t = static_cast<double>(r - lo) / (hi - lo);
                y = val(lo) + t * (val(hi) - val(lo));
                x = x_at(lo) + t * (x_at(hi) - x_at(lo));
            } else if (lo >= 0) {
                y = val(lo) + (center(r) - center(lo));
                x = x_at(lo);
            } else if (hi < n_rows) {
                y = val(hi) + (center(r) - center(hi));
                x = x_at(hi);
            } else {
                y = center(r);
                x = columns.centers[static_cast<std::size_t>(c)];
            }
            value[static_cast<std::size_t>(r)] = y;
            out.abscissa(r, c) = x;
        }
        for (int r = 0; r < n_rows; ++r) {
            out.grid(r, c) = value[static_cast<std::size_t>(r)] / image_height;
            if (out.slot(r, c) >= 0) out.abscissa(r, c) = points[static_cast<std::size_t>(out.slot(r, c))].x;
        }
    }
    return out;
}

}  // namespace gridwarp
