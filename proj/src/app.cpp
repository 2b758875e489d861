#include "gridwarp/app.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <thread>

#include "gridwarp/bench.hpp"
#include "gridwarp/config.hpp"
#include "gridwarp/csv.hpp"
#include "gridwarp/errors.hpp"
#include "gridwarp/metrics.hpp"
#include "gridwarp/pgm.hpp"
#include "gridwarp/pipeline.hpp"

namespace gridwarp {

namespace fs = std::filesystem;

int thread_budget() {
    int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("GRIDWARP_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && cap >= 1) n = std::min<long>(n, cap);
    }
    return n;
}

namespace {

struct Usage : Error {
    using Error::Error;
};

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Usage("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << text;
}

CostKind parse_cost(const std::string& s) { return s == "sq" ? CostKind::squared : CostKind::absolute; }
EndpointMode parse_mode(const std::string& s) { return s == "free" ? EndpointMode::free_j : EndpointMode::fixed; }

SceneConfig load_with_seed(const std::string& path, const std::optional<std::uint64_t>& seed) {
    SceneConfig cfg = load_config(path);
    if (seed) cfg.seed = *seed;
    return cfg;
}

void cmd_simulate(const std::string& config_path, const std::optional<std::uint64_t>& seed,
                  const fs::path& out_dir, std::ostream& out) {
    const SceneConfig cfg = load_with_seed(config_path, seed);
    const GroundTruth gt = emit_ground_truth(cfg, cfg.terrain);
    const GrayImage img = render_scene(cfg, cfg.terrain);
    ensure_dir(out_dir);
    write_pgm(out_dir / "image.pgm", img);
    csv::write_ground_truth(out_dir / "ground_truth.csv", gt);
    out << "wrote " << (out_dir / "image.pgm").string() << " and "
        << (out_dir / "ground_truth.csv").string() << '\n';
}

void cmd_reconstruct(const std::string& image_path, const std::string& config_path,
                     const std::optional<std::uint64_t>& seed, const fs::path& out_dir,
                     const ReconstructOptions& options, std::ostream& out) {
    const SceneConfig cfg = load_with_seed(config_path, seed);
    if (!fs::exists(image_path)) throw Usage("image not found: " + image_path);
    GrayImage img;
    try {
        img = read_pgm(fs::path(image_path));
    } catch (const InvalidInput& e) {
        throw Usage(e.what());
    }
    const Reconstruction rec = reconstruct(img, cfg, options);
    ensure_dir(out_dir);

    csv::write_heightmap(out_dir / "heightmap.csv", rec.height_map);
    const double h = cfg.grid.height;
    write_pgm(out_dir / "heightmap.pgm", heightmap_image(rec.height_map, -0.1 * h, h));
    csv::write_points(out_dir / "intersections.csv", rec.extraction.points);
    {
        std::ofstream m(out_dir / "matches.csv");
        m << "row,col,u,v,point\n";
        const auto& c = rec.correspondences;
        for (std::size_t k = 0; k < c.matches.size(); ++k) {
            m << c.matches[k].row << ',' << c.matches[k].col << ','
              << csv::format_double(c.matches[k].pixel.x()) << ','
              << csv::format_double(c.matches[k].pixel.y()) << ',' << c.point_index[k] << '\n';
        }
    }
    if (options.matcher == Matcher::dtw) {
        csv::write_matrix(out_dir / "d_cols.csv", rec.match.d_cols);
        csv::write_matrix(out_dir / "d_rows.csv", rec.match.d_rows);
        csv::write_path(out_dir / "column_path.csv", rec.match.column_path.path);
        csv::write_path(out_dir / "row_path.csv", rec.match.row_path.path);
        csv::write_values(out_dir / "column_mapping.csv", rec.match.column_mapping);
        csv::write_values(out_dir / "row_mapping.csv", rec.match.row_mapping);
    }
    nlohmann::json run = {{"config_digest", config_digest(cfg)}};
    for (const auto& [stage, seconds] : rec.timings) run["timings_s"][stage] = seconds;
    write_text(out_dir / "timings.json", run.dump(2) + "\n");

    out << "detected " << rec.extraction.points.size() << " intersections, "
        << rec.height_map.valid_count() << " of " << cfg.grid.n_rows * cfg.grid.n_cols
        << " nodes valid\n";
}

void cmd_evaluate(const std::string& heightmap_path, const std::string& truth_path,
                  const std::string& timings_path, const std::string& config_path,
                  const std::string& out_dir, std::ostream& out) {
    HeightMap estimate, truth;
    try {
        estimate = csv::read_heightmap(heightmap_path);
        truth = csv::read_heightmap(truth_path);
    } catch (const InvalidInput& e) {
        throw Usage(e.what());
    }
    RunReport report;
    try {
        report = evaluate_heightmap(estimate, truth);
    } catch (const InvalidInput& e) {
        throw Usage(e.what());
    }
    if (!timings_path.empty()) {
        std::ifstream in(timings_path);
        if (!in) throw Usage("cannot open " + timings_path);
        nlohmann::json run;
        try {
            run = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw Usage(timings_path + ": " + e.what());
        }
        if (run.contains("timings_s") && run["timings_s"].is_object()) {
            for (const auto& [stage, seconds] : run["timings_s"].items()) {
                if (seconds.is_number()) report.timings.emplace_back(stage, seconds.get<double>());
            }
        }
        if (run.contains("config_digest") && run["config_digest"].is_string()) {
            report.config_digest = run["config_digest"].get<std::string>();
        }
    }
    if (!config_path.empty()) report.config_digest = config_digest(load_config(config_path));

    out << report_to_text(report);
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        write_text(fs::path(out_dir) / "report.json", report_to_json(report).dump(2) + "\n");
    }
}

void cmd_bench(const BenchOptions& options, const std::string& out_dir, std::ostream& out) {
    const auto rows = bench_match(options);
    const auto fit = fit_loglog(rows);
    out << "N,mean_seconds\n";
    for (const auto& r : rows) out << r.n << ',' << csv::format_double(r.mean_seconds) << '\n';
    if (fit) out << "log-log slope " << fit->slope << '\n';
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        write_bench_csv(fs::path(out_dir) / "bench.csv", rows);
        write_text(fs::path(out_dir) / "bench.svg", bench_svg(rows, fit));
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Grid-pattern height reconstruction with column-wise DTW matching", "gridwarp"};
    app.require_subcommand(1);

    std::string config_path, out_dir, image_path, heightmap_path, truth_path, timings_path;
    std::optional<std::uint64_t> seed;
    std::string mode = "fixed", cost = "abs", matcher = "dtw";
    std::vector<int> sizes{8, 16, 32, 64};
    int trials = 3;

    const auto add_match_flags = [&](CLI::App* cmd) {
        cmd->add_option("--mode", mode, "river path endpoint mode")
            ->check(CLI::IsMember({"fixed", "free"}));
        cmd->add_option("--cost", cost, "DTW local cost")->check(CLI::IsMember({"abs", "sq"}));
    };

    auto* sim = app.add_subcommand("simulate", "render a scene and write its ground truth");
    sim->add_option("--config", config_path, "scene config JSON")->required();
    sim->add_option("--seed", seed, "override the config seed");
    sim->add_option("--out", out_dir, "output directory")->required();

    auto* rec = app.add_subcommand("reconstruct", "image -> height map");
    rec->add_option("--image", image_path, "input PGM")->required();
    rec->add_option("--config", config_path, "scene config JSON")->required();
    rec->add_option("--seed", seed, "override the config seed");
    rec->add_option("--out", out_dir, "output directory")->required();
    rec->add_option("--matcher", matcher, "correspondence method")
        ->check(CLI::IsMember({"dtw", "nearest"}));
    add_match_flags(rec);

    auto* ev = app.add_subcommand("evaluate", "compare a height map with ground truth");
    ev->add_option("--heightmap", heightmap_path, "reconstructed height map CSV")->required();
    ev->add_option("--truth", truth_path, "ground truth CSV")->required();
    ev->add_option("--timings", timings_path, "timings.json from reconstruct");
    ev->add_option("--config", config_path, "scene config, for the report digest");
    ev->add_option("--out", out_dir, "directory for report.json");

    auto* bench = app.add_subcommand("bench", "time the column matching against grid size");
    bench->add_option("--sizes", sizes, "grid sizes N")->delimiter(',');
    bench->add_option("--trials", trials, "timed trials per size");
    bench->add_option("--seed", seed, "input seed");
    bench->add_option("--out", out_dir, "directory for bench.csv and bench.svg");
    add_match_flags(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    MatchOptions match;
    match.cost = parse_cost(cost);
    match.mode = parse_mode(mode);
    match.threads = thread_budget();

    try {
        if (*sim) {
            cmd_simulate(config_path, seed, out_dir, out);
        } else if (*rec) {
            ReconstructOptions options;
            options.match = match;
            options.matcher = matcher == "nearest" ? Matcher::nearest : Matcher::dtw;
            cmd_reconstruct(image_path, config_path, seed, out_dir, options, out);
        } else if (*ev) {
            cmd_evaluate(heightmap_path, truth_path, timings_path, config_path, out_dir, out);
        } else if (*bench) {
            BenchOptions options;
            options.sizes = sizes;
            options.trials = trials;
            options.seed = seed.value_or(1);
            options.match = match;
            cmd_bench(options, out_dir, out);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SceneInvalid& e) {
        err << "invalid scene: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Usage& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidInput& e) {
        // Bad bench sizes and similar argument-level problems.
        err << "error: " << e.what() << '\n';
        return *bench ? kExitUsage : kExitPipeline;
    } catch (const Error& e) {
        err << "pipeline failure: " << e.what() << '\n';
        return kExitPipeline;
    }
    return kExitOk;
}

}  // namespace gridwarp
