#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "warplab/bounds.hpp"
#include "warplab/io.hpp"

using namespace warplab;
using namespace warplab::cli;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::vector<std::string>& args, Environment env = {}) {
    std::ostringstream out;
    auto cfg = parse_config(args, out, env);
    if (!cfg) throw std::runtime_error("help requested");
    return *cfg;
}

class CliRun : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("warplab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int exec(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return run(args, out_, err_);
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

}  // namespace

TEST(ParseConfig, SpectrumOnSphere) {
    const auto cfg = parse({"spectrum", "--n", "3", "--gamma", "1", "--metric", "sphere"});
    EXPECT_EQ(cfg.command, "spectrum");
    EXPECT_EQ(cfg.values.at("n"), "3");
    EXPECT_EQ(cfg.values.at("gamma"), "1");
    EXPECT_EQ(cfg.values.at("metric"), "sphere");
    EXPECT_EQ(cfg.values.at("grid"), "4096");
    EXPECT_TRUE(cfg.sweeps.empty());
    EXPECT_EQ(cfg.points().size(), 1u);
    EXPECT_EQ(cfg.explicit_keys, (std::set<std::string>{"n", "gamma", "metric"}));
}

TEST(ParseConfig, LargeDiameterPipeline) {
    const auto cfg = parse({"counterexample", "large-diameter", "--n", "5", "--gamma", "1.25", "--L", "10"});
    EXPECT_EQ(cfg.command, "counterexample large-diameter");
    EXPECT_EQ(cfg.values.at("L"), "10");
    EXPECT_EQ(cfg.values.at("gamma"), "1.25");
    EXPECT_EQ(cfg.values.at("grid"), "8193");
}

TEST(ParseConfig, RejectsBadValues) {
    EXPECT_THROW(parse({"spectrum", "--gamma", "-1"}), UsageError);
    EXPECT_THROW(parse({"spectrum", "--gamma", "abc"}), UsageError);
    EXPECT_THROW(parse({"spectrum", "--n", "3.5"}), UsageError);
    EXPECT_THROW(parse({"spectrum", "--lambda", "0"}), UsageError);
    EXPECT_THROW(parse({"spectrum", "--tol", "nan"}), UsageError);
    EXPECT_THROW(parse({"spectrum", "--potential", "weird"}), UsageError);
    EXPECT_THROW(parse({"spectrum", "--frob", "1"}), UsageError);
    EXPECT_THROW(parse({"bounds", "volume", "--gamma", "1"}), UsageError);  // not a volume key
    EXPECT_THROW(parse({"bounds"}), UsageError);
    EXPECT_THROW(parse({}), UsageError);
    EXPECT_THROW(parse({"bounds", "diameter", "--u-max", "0.5"}), UsageError);
    EXPECT_THROW(parse({"counterexample", "large-diameter", "--n", "3"}), UsageError);
    EXPECT_THROW(parse({"counterexample", "supercritical", "--amplitude", "2"}), UsageError);
    EXPECT_THROW(parse({"profile", "check"}), UsageError);
    EXPECT_THROW(parse({"profile", "check", "--input", "/nonexistent/curve.csv"}), UsageError);
    EXPECT_THROW(parse({"spectrum", "--metric", "file"}), UsageError);
}

TEST(ParseConfig, Sweeps) {
    const auto cfg = parse({"counterexample", "large-diameter", "--gamma", "1.05:1.33:8"});
    ASSERT_EQ(cfg.sweeps.size(), 1u);
    const auto pts = cfg.points();
    ASSERT_EQ(pts.size(), 8u);
    EXPECT_EQ(pts.front().text("gamma"), "1.05");
    EXPECT_EQ(pts[2].text("gamma"), "1.13");
    EXPECT_EQ(pts.back().text("gamma"), "1.33");
    std::set<std::string> hashes;
    for (const auto& p : pts) hashes.insert(p.hash());
    EXPECT_EQ(hashes.size(), 8u);

    const auto grid = parse({"spectrum", "--n", "3:5:3", "--gamma", "0:1.5:2"}).points();
    ASSERT_EQ(grid.size(), 6u);
    EXPECT_EQ(grid[0].text("n"), "3");
    EXPECT_EQ(grid[1].text("n"), "4");
    EXPECT_EQ(grid[3].text("gamma"), "1.5");

    EXPECT_EQ(parse({"spectrum", "--gamma", "1:1:1"}).points().size(), 1u);
    EXPECT_THROW(parse({"spectrum", "--gamma", "1:2:0"}), UsageError);
    EXPECT_THROW(parse({"spectrum", "--gamma", "1:2"}), UsageError);
    EXPECT_THROW(parse({"spectrum", "--gamma", "-1:1:3"}), UsageError);  // first point invalid
}

TEST(ParseConfig, GridEnvironment) {
    Environment env;
    env.grid = "1024";
    EXPECT_EQ(parse({"spectrum"}, env).values.at("grid"), "1024");
    EXPECT_EQ(parse({"counterexample", "supercritical"}, env).values.at("grid"), "1024");
    EXPECT_EQ(parse({"spectrum", "--grid", "513"}, env).values.at("grid"), "513");
    env.grid = "lots";
    EXPECT_THROW(parse({"spectrum"}, env), UsageError);
}

TEST(ParseConfig, HelpReturnsNothing) {
    std::ostringstream out;
    EXPECT_FALSE(parse_config({"bounds", "volume", "--help"}, out, {}).has_value());
    EXPECT_NE(out.str().find("--lambda"), std::string::npos);
    EXPECT_NE(out.str().find("[1e-6]"), std::string::npos);
}

TEST_F(CliRun, ConfigFileAndOverrides) {
    io::write_text(dir_ / "c.ini", "[bounds.volume]\nn = 4\nlambda = 4\n\n[spectrum]\ngamma = 0.5\n");
    auto cfg = parse({"bounds", "volume", "--config", (dir_ / "c.ini").string()});
    EXPECT_EQ(cfg.values.at("n"), "4");
    EXPECT_EQ(cfg.values.at("lambda"), "4");
    cfg = parse({"bounds", "volume", "--config", (dir_ / "c.ini").string(), "--n", "5"});
    EXPECT_EQ(cfg.values.at("n"), "5");
    EXPECT_EQ(parse({"--config", (dir_ / "c.ini").string(), "spectrum"}).values.at("gamma"), "0.5");

    io::write_text(dir_ / "bad.ini", "[bounds.volume]\nbogus = 1\n");
    EXPECT_THROW(parse({"bounds", "volume", "--config", (dir_ / "bad.ini").string()}), UsageError);
    io::write_text(dir_ / "neg.ini", "[spectrum]\ngamma = -2\n");
    EXPECT_THROW(parse({"spectrum", "--config", (dir_ / "neg.ini").string()}), UsageError);
}

TEST_F(CliRun, VolumeOnSphereIsRigid) {
    const auto out = dir_ / "vol";
    EXPECT_EQ(exec({"bounds", "volume", "--n", "3", "--lambda", "1", "--metric", "sphere", "--out", out.string()}),
              exit_pass);
    EXPECT_NE(out_.str().find("PASS"), std::string::npos);
    const std::string printed = out_.str();
    EXPECT_EQ(std::count(printed.begin(), printed.end(), '\n'), 1);
    const std::string csv = io::read_text(out / "verdict.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), io::verdict_csv_header);
    const auto v = io::parse_verdict_csv_row(csv.substr(csv.find('\n') + 1));
    EXPECT_TRUE(v.rigid);
    EXPECT_LE(std::abs(v.slack), 1e-6 * v.rhs);
    EXPECT_NEAR(v.rhs, bounds::vol_round_sphere(3), 1e-12);
    const auto j = io::parse_verdict_json(io::read_text(out / "verdict.json"));
    EXPECT_EQ(j.slack, v.slack);
}

TEST_F(CliRun, VerdictFailureExitsOne) {
    EXPECT_EQ(exec({"bounds", "volume", "--radius", "1.1", "--grid", "1025", "--out", dir_.string()}),
              exit_verdict_failed);
    EXPECT_NE(out_.str().find("FAIL"), std::string::npos);
    EXPECT_EQ(exec({"bounds", "gamma-range", "--n", "4", "--gamma", "2", "--out", dir_.string()}),
              exit_verdict_failed);
}

TEST_F(CliRun, StageFailureCarriesStageId) {
    EXPECT_EQ(exec({"counterexample", "large-diameter", "--L", "0.5", "--grid", "1025", "--out", dir_.string()}),
              exit_error);
    EXPECT_NE(out_.str().find("ERROR stage=delta"), std::string::npos) << out_.str();
}

TEST_F(CliRun, UsageErrorExitsTwo) {
    EXPECT_EQ(exec({"spectrum", "--gamma", "-1", "--out", dir_.string()}), exit_usage);
    EXPECT_NE(err_.str().find("--gamma"), std::string::npos);
}

TEST_F(CliRun, ProfileModelThenCheck) {
    ASSERT_EQ(exec({"profile", "model", "--n", "4", "--grid", "2049", "--out", (dir_ / "m").string()}), exit_pass);
    ASSERT_EQ(exec({"profile", "check", "--input", (dir_ / "m" / "model.csv").string(), "--out",
                    (dir_ / "c").string()}),
              exit_pass);
    const auto residual = io::read_csv(dir_ / "c" / "residual.csv");
    EXPECT_TRUE(residual.has("v") && residual.has("residual"));
    const auto verdict = io::parse_comparison_json(io::read_text(dir_ / "c" / "comparison.json"));
    EXPECT_EQ(verdict.status, profile::VerdictStatus::Holds);
}

TEST_F(CliRun, RadialProfileFromMetricFile) {
    ASSERT_EQ(exec({"spectrum", "--n", "5", "--grid", "2049", "--out", (dir_ / "s").string()}), exit_pass);
    ASSERT_EQ(exec({"profile", "radial", "--input", (dir_ / "s" / "metric.csv").string(), "--out",
                    (dir_ / "r").string()}),
              exit_pass)
        << out_.str();
    EXPECT_EQ(io::read_curve(dir_ / "r" / "curve.csv").n, 5);
    EXPECT_EQ(exec({"profile", "radial", "--input", (dir_ / "s" / "metric.csv").string(), "--n", "3"}), exit_usage);
}

TEST_F(CliRun, SweepWritesOneDirectoryPerPoint) {
    const int code = exec({"counterexample", "large-diameter", "--gamma", "1.05:1.33:8", "--grid", "2049",
                           "--jobs", "3", "--out", dir_.string()});
    std::size_t dirs = 0;
    for (const auto& e : fs::directory_iterator(dir_)) dirs += e.is_directory();
    EXPECT_EQ(dirs, 8u);
    const std::string printed = out_.str();
    EXPECT_EQ(std::count(printed.begin(), printed.end(), '\n'), 8);
    EXPECT_TRUE(code == exit_pass || code == exit_error);
    const auto table = io::read_text(dir_ / "sweep.csv");
    EXPECT_EQ(table.substr(0, table.find('\n')), "dir,gamma,status");
    // the point at 1.25 builds
    const auto pts = parse({"counterexample", "large-diameter", "--gamma", "1.05:1.33:8", "--grid", "2049"}).points();
    EXPECT_TRUE(fs::exists(dir_ / pts[5].hash() / "report.json"));
}

TEST_F(CliRun, DeterministicArtifacts) {
    for (const char* sub : {"a", "b"}) {
        ASSERT_EQ(exec({"counterexample", "supercritical", "--grid", "513", "--out", (dir_ / sub).string()}),
                  exit_pass);
    }
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir_ / "a")) {
        ++files;
        EXPECT_EQ(io::read_text(e.path()), io::read_text(dir_ / "b" / e.path().filename())) << e.path();
    }
    EXPECT_GE(files, 8u);
}

TEST_F(CliRun, ParamsFileReproducesRun) {
    ASSERT_EQ(exec({"identity", "grouping", "--n", "5", "--samples", "1000", "--out", (dir_ / "a").string()}),
              exit_pass);
    const auto again = parse({"identity", "grouping", "--config", (dir_ / "a" / "params.ini").string()});
    const auto first = parse({"identity", "grouping", "--n", "5", "--samples", "1000"});
    EXPECT_EQ(again.points().front().hash(), first.points().front().hash());
}
