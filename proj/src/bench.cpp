#include "gridwarp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gridwarp/csv.hpp"
#include "gridwarp/errors.hpp"
#include "gridwarp/random.hpp"

namespace gridwarp {

namespace {

Eigen::MatrixXd random_grid(Rng& rng, int n) {
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = rng.uniform();
    }
    return m;
}

}  // namespace

std::vector<BenchRow> bench_match(const BenchOptions& options) {
    if (options.trials < 1) throw InvalidInput("bench needs at least one trial");
    for (int n : options.sizes) {
        if (n < 4) throw InvalidInput("bench sizes must be >= 4");
    }
    using Clock = std::chrono::steady_clock;
    std::vector<BenchRow> rows;
    double sink = 0.0;
    for (int n : options.sizes) {
        Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(n)));
        const Eigen::MatrixXd a = random_grid(rng, n);
        const Eigen::MatrixXd b = random_grid(rng, n);
        double total = 0.0;
        int calls = 0;
        for (int t = 0; t < options.trials; ++t) {
            const auto t0 = Clock::now();
            double elapsed = 0.0;
            do {
                const DistanceLandscape d =
                    column_distance_matrix(a, b, options.match.cost, options.match.threads);
                sink += river_path_dp(d, options.match.mode).cost;
                ++calls;
                elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
            } while (elapsed < options.min_trial_seconds);
            total += elapsed;
        }
        rows.push_back({n, total / calls, calls});
    }
    // Keeps the timed calls observable.
    if (std::isnan(sink)) throw Error("benchmark produced a NaN cost");
    return rows;
}

std::optional<LogLogFit> fit_loglog(const std::vector<BenchRow>& rows) {
    if (rows.size() < 2) return std::nullopt;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& r : rows) {
        const double x = std::log(static_cast<double>(r.n));
        const double y = std::log(r.mean_seconds);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(rows.size());
    const double denom = n * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0)) return std::nullopt;
    LogLogFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

void write_bench_csv(const std::filesystem::path& path, const std::vector<BenchRow>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "N,mean_seconds\n";
    for (const auto& r : rows) out << r.n << ',' << csv::format_double(r.mean_seconds) << '\n';
}

std::string bench_svg(const std::vector<BenchRow>& rows, const std::optional<LogLogFit>& fit) {
    constexpr double W = 480, H = 360, L = 70, R = 20, T = 20, B = 50;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (rows.empty()) {
        s << "</svg>\n";
        return s.str();
    }
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    for (const auto& r : rows) {
        x_lo = std::min(x_lo, std::log10(static_cast<double>(r.n)));
        x_hi = std::max(x_hi, std::log10(static_cast<double>(r.n)));
        y_lo = std::min(y_lo, std::log10(r.mean_seconds));
        y_hi = std::max(y_hi, std::log10(r.mean_seconds));
    }
    x_lo = std::floor(x_lo * 10) / 10 - 0.05;
    x_hi = std::ceil(x_hi * 10) / 10 + 0.05;
    y_lo = std::floor(y_lo) - 0.1;
    y_hi = std::ceil(y_hi) + 0.1;
    const auto px = [&](double lx) { return L + (lx - x_lo) / (x_hi - x_lo) * (W - L - R); };
    const auto py = [&](double ly) { return H - B - (ly - y_lo) / (y_hi - y_lo) * (H - T - B); };

    s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
    for (const auto& r : rows) {
        const double x = px(std::log10(static_cast<double>(r.n)));
        s << "<text x=\"" << x << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << r.n
          << "</text>\n";
    }
    for (int e = static_cast<int>(std::ceil(y_lo)); e <= static_cast<int>(std::floor(y_hi)); ++e) {
        s << "<text x=\"" << L - 6 << "\" y=\"" << py(e) + 4 << "\" text-anchor=\"end\">1e" << e
          << "</text>\n";
        s << "<line x1=\"" << L << "\" y1=\"" << py(e) << "\" x2=\"" << W - R << "\" y2=\"" << py(e)
          << "\" stroke=\"#ddd\"/>\n";
    }
    s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10
      << "\" text-anchor=\"middle\">N (grid size)</text>\n";
    s << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (T + H - B) / 2 << ")\">seconds per match</text>\n";
    if (fit) {
        const double ln10 = std::log(10.0);
        const auto fy = [&](double lx) { return (fit->intercept + fit->slope * lx * ln10) / ln10; };
        s << "<line x1=\"" << px(x_lo) << "\" y1=\"" << py(fy(x_lo)) << "\" x2=\"" << px(x_hi)
          << "\" y2=\"" << py(fy(x_hi)) << "\" stroke=\"#c33\" stroke-dasharray=\"4 3\"/>\n";
        s << "<text x=\"" << L + 10 << "\" y=\"" << T + 14 << "\" fill=\"#c33\">slope "
          << std::round(fit->slope * 100) / 100 << "</text>\n";
    }
    for (const auto& r : rows) {
        s << "<circle cx=\"" << px(std::log10(static_cast<double>(r.n))) << "\" cy=\""
          << py(std::log10(r.mean_seconds)) << "\" r=\"4\" fill=\"#236\"/>\n";
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace gridwarp
