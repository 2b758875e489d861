#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "gridwarp/app.hpp"
#include "gridwarp/config.hpp"
#include "gridwarp/pgm.hpp"

using namespace gridwarp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    args.insert(args.begin(), "gridwarp");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliRun r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("gridwarp_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string config(const char* name) { return (fs::path(GRIDWARP_CONFIG_DIR) / name).string(); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t file_count(const fs::path& dir) {
    return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}));
}

}  // namespace

TEST(Cli, SimulateWritesImageAndTruthDeterministically) {
    const fs::path a = fresh_dir("sim_a"), b = fresh_dir("sim_b");
    ASSERT_EQ(cli({"simulate", "--config", config("blocks_10mm.json"), "--out", a.string()}).code, kExitOk);
    ASSERT_EQ(cli({"simulate", "--config", config("blocks_10mm.json"), "--out", b.string()}).code, kExitOk);
    EXPECT_EQ(file_count(a), 2u);
    EXPECT_TRUE(fs::exists(a / "image.pgm"));
    EXPECT_TRUE(fs::exists(a / "ground_truth.csv"));
    EXPECT_EQ(slurp(a / "image.pgm"), slurp(b / "image.pgm"));
    EXPECT_EQ(slurp(a / "ground_truth.csv"), slurp(b / "ground_truth.csv"));

    const fs::path c = fresh_dir("sim_c");
    ASSERT_EQ(cli({"simulate", "--config", config("blocks_10mm.json"), "--seed", "5", "--out", c.string()}).code,
              kExitOk);
    EXPECT_NE(slurp(a / "image.pgm"), slurp(c / "image.pgm"));
}

TEST(Cli, EndToEndMatchesGoldenReport) {
    const fs::path dir = fresh_dir("e2e");
    ASSERT_EQ(cli({"simulate", "--config", config("flat.json"), "--out", dir.string()}).code, kExitOk);
    const CliRun rec = cli({"reconstruct", "--image", (dir / "image.pgm").string(), "--config",
                         config("flat.json"), "--out", (dir / "rec").string()});
    ASSERT_EQ(rec.code, kExitOk) << rec.err;
    EXPECT_NE(rec.out.find("detected 64 intersections"), std::string::npos);
    for (const char* f : {"heightmap.csv", "heightmap.pgm", "intersections.csv", "matches.csv", "timings.json",
                          "d_cols.csv", "d_rows.csv", "column_path.csv", "row_path.csv",
                          "column_mapping.csv", "row_mapping.csv"}) {
        EXPECT_TRUE(fs::exists(dir / "rec" / f)) << f;
    }

    const CliRun ev = cli({"evaluate", "--heightmap", (dir / "rec" / "heightmap.csv").string(), "--truth",
                        (dir / "ground_truth.csv").string(), "--timings", (dir / "rec" / "timings.json").string(),
                        "--out", dir.string()});
    ASSERT_EQ(ev.code, kExitOk) << ev.err;
    json report = json::parse(slurp(dir / "report.json"));
    ASSERT_TRUE(report.contains("timings_s"));
    EXPECT_TRUE(report["timings_s"].contains("match"));
    report.erase("timings_s");

    const json golden = json::parse(slurp(fs::path(GRIDWARP_TEST_DATA) / "flat_report.json"));
    EXPECT_EQ(report, golden) << report.dump(2);
}

TEST(Cli, NearestMatcherSkipsDtwArtifacts) {
    const fs::path dir = fresh_dir("nearest");
    ASSERT_EQ(cli({"simulate", "--config", config("flat.json"), "--out", dir.string()}).code, kExitOk);
    const CliRun rec = cli({"reconstruct", "--image", (dir / "image.pgm").string(), "--config",
                         config("flat.json"), "--out", (dir / "rec").string(), "--matcher", "nearest"});
    ASSERT_EQ(rec.code, kExitOk) << rec.err;
    EXPECT_TRUE(fs::exists(dir / "rec" / "heightmap.csv"));
    EXPECT_FALSE(fs::exists(dir / "rec" / "d_cols.csv"));
}

TEST(Cli, MissingConfigFieldIsUsageError) {
    const fs::path dir = fresh_dir("bad_config");
    json doc = json::parse(slurp(config("flat.json")));
    doc["grid"].erase("rows");
    std::ofstream(dir / "bad.json") << doc.dump();
    const CliRun r = cli({"simulate", "--config", (dir / "bad.json").string(), "--out", dir.string()});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("grid.rows"), std::string::npos);
}

TEST(Cli, TerrainThroughDisplayIsUsageError) {
    const fs::path dir = fresh_dir("tall");
    json doc = json::parse(slurp(config("blocks_10mm.json")));
    doc["terrain"]["blocks"][0]["height_m"] = 0.04;
    std::ofstream(dir / "tall.json") << doc.dump();
    EXPECT_EQ(cli({"simulate", "--config", (dir / "tall.json").string(), "--out", dir.string()}).code, kExitUsage);
}

TEST(Cli, BlackImageIsPipelineFailure) {
    const fs::path dir = fresh_dir("black");
    write_pgm(dir / "black.pgm", GrayImage(640, 640, 0.0));
    const CliRun r = cli({"reconstruct", "--image", (dir / "black.pgm").string(), "--config", config("flat.json"),
                       "--out", (dir / "rec").string()});
    EXPECT_EQ(r.code, kExitPipeline);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, MissingImageIsUsageError) {
    const fs::path dir = fresh_dir("noimage");
    EXPECT_EQ(cli({"reconstruct", "--image", (dir / "none.pgm").string(), "--config", config("flat.json"),
                   "--out", dir.string()})
                  .code,
              kExitUsage);
}

TEST(Cli, EvaluateDimensionMismatchIsUsageError) {
    const fs::path dir = fresh_dir("mismatch");
    std::ofstream(dir / "a.csv") << "row,col,X,Y,Z,valid\n1,1,0,0,0,1\n1,2,0,0,0,1\n";
    std::ofstream(dir / "b.csv") << "row,col,X,Y,Z,valid\n1,1,0,0,0,1\n2,1,0,0,0,1\n";
    const CliRun r = cli({"evaluate", "--heightmap", (dir / "a.csv").string(), "--truth", (dir / "b.csv").string()});
    EXPECT_EQ(r.code, kExitUsage);
}

TEST(Cli, BenchSingleSizeHasNoSlope) {
    const fs::path dir = fresh_dir("bench");
    const CliRun r = cli({"bench", "--sizes", "4", "--trials", "1", "--out", dir.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out.rfind("N,mean_seconds\n4,", 0), 0u);
    EXPECT_EQ(r.out.find("slope"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "bench.csv"));
    EXPECT_TRUE(fs::exists(dir / "bench.svg"));
}

TEST(Cli, BenchRejectsTinySizes) {
    EXPECT_EQ(cli({"bench", "--sizes", "2", "--trials", "1"}).code, kExitUsage);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(cli({}).code, kExitUsage);
    EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
    EXPECT_EQ(cli({"simulate", "--out", "x"}).code, kExitUsage);
    EXPECT_EQ(cli({"reconstruct", "--image", "a", "--config", "b", "--out", "c", "--matcher", "best"}).code,
              kExitUsage);
    EXPECT_EQ(cli({"--help"}).code, kExitOk);
}
