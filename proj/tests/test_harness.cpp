#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ibfsi/errors.hpp"
#include "ibfsi/harness.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ibfsi;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("config parsing accepts the documented schema") {
    const std::string text = R"({
        "benchmark": "membrane",
        "kernel": "CBS43",
        "mfac": 1.0,
        "n": 32,
        "final_time": 0.25,
        "membrane": {"kappa": 2.0, "tracers": 5000}
    })";
    const BenchmarkConfig cfg = BenchmarkConfig::from_json_text(text);
    CHECK(cfg.kind == BenchmarkKind::Membrane);
    CHECK(cfg.kernel == "CBS43");
    CHECK(cfg.mfac == 1.0);
    CHECK(cfg.resolution == 32);
    CHECK(cfg.final_time == 0.25);
    CHECK(cfg.membrane_kappa == 2.0);
    CHECK(cfg.membrane_tracers == 5000);
}

TEST_CASE("unknown config keys are errors") {
    CHECK_THROWS_AS(BenchmarkConfig::from_json_text(R"({"benchmark":"membrane","typo":1})"),
                    ConfigError);
    CHECK_THROWS_AS(
        BenchmarkConfig::from_json_text(R"({"benchmark":"membrane","membrane":{"bad":1}})"),
        ConfigError);
    CHECK_THROWS_AS(
        BenchmarkConfig::from_json_text(R"({"benchmark":"membrane","band":{"thickness":0.1}})"),
        ConfigError);
    CHECK_THROWS_AS(BenchmarkConfig::from_json_text(R"({"benchmark":"vortex"})"), ConfigError);
    CHECK_THROWS_AS(BenchmarkConfig::from_json_text(R"({"benchmark":"membrane","kernel":"CBS99"})"),
                    ConfigError);
    CHECK_THROWS_AS(BenchmarkConfig::from_json_text("not json"), ConfigError);
}

TEST_CASE("load ramp") {
    CHECK(load_ramp(0.0, 10.0) == 0.0);
    CHECK(load_ramp(5.0, 10.0) == 0.5);
    CHECK(load_ramp(10.0, 10.0) == 1.0);
    CHECK(load_ramp(25.0, 10.0) == 1.0);
    CHECK(load_ramp(3.0, 0.0) == 1.0); // no ramp configured
}

TEST_CASE("time series enforces increasing t") {
    TimeSeries s;
    s.columns = {"t", "a"};
    s.add_row({0.0, 1.0});
    s.add_row({0.5, 2.0});
    CHECK_THROWS_AS(s.add_row({0.5, 3.0}), InvalidArgumentError);
    CHECK(s.last("a") == 2.0);
    CHECK(s.max_abs("a") == 2.0);
    CHECK(s.column("missing") == -1);
}

TEST_CASE("csv output is RFC-4180 with t first") {
    TimeSeries s;
    s.columns = {"t", "value"};
    s.add_row({0.0, 1.5});
    s.add_row({0.125, -2.0});
    const std::string path = "test_series.csv";
    write_csv(s, path);
    const std::string text = slurp(path);
    CHECK(text == "t,value\r\n0,1.5\r\n0.125,-2\r\n");

    // header-only output for an empty series
    TimeSeries empty;
    empty.columns = {"t", "a", "b"};
    write_csv(empty, path);
    CHECK(slurp(path) == "t,a,b\r\n");
    std::remove(path.c_str());
}

TEST_CASE("channel exact solution peaks at the configured maximum") {
    BenchmarkConfig cfg = make_channel_config("CBS32", 32);
    // channel-width coordinate d = 0.5 at (x, y) solving y cos - x sin = 1/2
    const double theta = cfg.channel_theta;
    const double y = (0.5 + 0.5 * std::sin(theta)) / std::cos(theta);
    const Vec2 u = channel_exact_velocity(cfg, {0.5, y});
    CHECK(u.norm() == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(u.y / u.x == doctest::Approx(std::tan(theta)).epsilon(1e-12));
    CHECK(channel_exact_velocity(cfg, {0.9, 0.0}).norm() == 0.0);
}

TEST_CASE("membrane run: starts exact, conserves area to discretization error") {
    BenchmarkConfig cfg = make_membrane_config("CBS32", 32, 0.5);
    cfg.final_time = 0.05;
    cfg.membrane_tracers = 2000;
    const RunResult res = run(cfg);
    REQUIRE(res.completed);
    CHECK(res.series.rows.front()[res.series.column("dA")] == 0.0);
    CHECK(res.series.last("dA") < 1e-4);
    CHECK(res.series.last("t") == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("benchmark runs are bitwise deterministic") {
    BenchmarkConfig cfg = make_membrane_config("IB4", 16, 1.0);
    cfg.final_time = 0.05;
    cfg.membrane_tracers = 500;
    const RunResult a = run(cfg);
    const RunResult b = run(cfg);
    REQUIRE(a.series.rows.size() == b.series.rows.size());
    for (size_t r = 0; r < a.series.rows.size(); ++r)
        for (size_t c = 0; c < a.series.rows[r].size(); ++c)
            CHECK(a.series.rows[r][c] == b.series.rows[r][c]);

    write_csv(a.series, "det_a.csv");
    write_csv(b.series, "det_b.csv");
    CHECK(slurp("det_a.csv") == slurp("det_b.csv"));
    std::remove("det_a.csv");
    std::remove("det_b.csv");
}

TEST_CASE("block run settles under the ramped load") {
    BenchmarkConfig cfg = make_block_config("CBS32", 8, 0.5, {});
    const RunResult res = run(cfg);
    REQUIRE(!res.failed);
    CHECK(res.series.last("dy_probe") < -0.05); // pressed downward
    CHECK(res.series.last("j_l2") < 0.5);
    // displacement has settled: the last quarter of the run moves little
    const int c = res.series.column("dy_probe");
    const auto& rows = res.series.rows;
    const double late = rows[rows.size() * 3 / 4][c];
    CHECK(res.series.last("dy_probe") == doctest::Approx(late).epsilon(0.05));
}

TEST_CASE("band run bows toward the low-pressure side") {
    BenchmarkConfig cfg = make_band_config("CBS32", 16, 1.0);
    cfg.final_time = 0.25;
    const RunResult res = run(cfg);
    REQUIRE(!res.failed);
    CHECK(res.series.last("dx_max") > 0.01);
    CHECK(res.series.last("dx_max") < 0.5);
}

TEST_CASE("named probes add sampled velocity columns") {
    const std::string text = R"({
        "benchmark": "channel", "kernel": "BS2", "n": 8, "final_time": 0.3,
        "probes": [{"name": "mid", "x": 0.5, "y": 0.72}]
    })";
    const BenchmarkConfig cfg = BenchmarkConfig::from_json_text(text);
    const RunResult res = run(cfg);
    REQUIRE(res.completed);
    REQUIRE(res.series.column("mid_u") >= 0);
    const Vec2 exact = channel_exact_velocity(cfg, {0.5, 0.72});
    CHECK(res.series.last("mid_u") == doctest::Approx(exact.x).epsilon(0.25));
    CHECK_THROWS_AS(
        BenchmarkConfig::from_json_text(
            R"({"benchmark":"channel","probes":[{"name":"p","x":0.1,"z":0.2}]})"),
        ConfigError);
}

TEST_CASE("cook membrane run pulls the corner upward") {
    BenchmarkConfig cfg = make_cook_config("CBS32", 8, 0.5, {});
    const RunResult res = run(cfg);
    REQUIRE(!res.failed);
    CHECK(res.series.last("dy_probe") > 0.1); // traction lifts the free corner
    CHECK(res.series.last("j_l2") < 0.5);
}

TEST_CASE("membrane vorticity error is visibly smaller for composite kernels") {
    BenchmarkConfig a = make_membrane_config("IB4", 32, 0.5);
    a.final_time = 0.2;
    a.membrane_tracers = 500;
    BenchmarkConfig b = a;
    b.kernel = "CBS43";
    const RunResult ra = run(a), rb = run(b);
    REQUIRE(!ra.failed);
    REQUIRE(!rb.failed);
    CHECK(rb.series.last("max_vorticity") < 0.5 * ra.series.last("max_vorticity"));
}

TEST_CASE("channel smoke run stays near the exact profile") {
    BenchmarkConfig cfg = make_channel_config("CBS32", 16);
    cfg.final_time = 0.5;
    const RunResult res = run(cfg);
    REQUIRE(res.completed);
    CHECK(res.series.last("profile_err") < 0.5);
    const auto prof = channel_profile(cfg, res);
    CHECK(prof.size() > 10);
    CHECK(boundary_layer_width(cfg, res) < 0.5);
}

TEST_CASE("turek smoke run holds the beam and stays bounded") {
    BenchmarkConfig cfg = make_turek_config("IB3", 24, 1.0);
    cfg.final_time = 0.01;
    const RunResult res = run(cfg);
    REQUIRE(!res.failed);
    CHECK(std::fabs(res.series.last("dy_a")) < 0.05);
}

TEST_CASE("horizontal channel converges to plane Poiseuille at first order") {
    double errs[2];
    const int sizes[2] = {16, 32};
    for (int k = 0; k < 2; ++k) {
        BenchmarkConfig cfg = make_channel_config("CBS32", sizes[k]);
        cfg.channel_theta = 0.0;
        cfg.final_time = 3.0;
        const RunResult res = run(cfg);
        REQUIRE(res.completed);
        // fixed interior band, away from the immersed walls
        double err = 0.0, peak = 0.0;
        for (const auto& s : channel_profile(cfg, res)) {
            peak = std::max(peak, s.speed_exact);
            if (s.wall_distance > 0.15) err = std::max(err, std::fabs(s.speed_num - s.speed_exact));
        }
        errs[k] = err / peak;
    }
    CHECK(errs[1] < errs[0] / 1.6); // at least first order in h
}

TEST_CASE("oversized time steps are halved until stable, never regrown past the config") {
    BenchmarkConfig cfg = make_channel_config("BS2", 8);
    cfg.final_time = 0.25;
    cfg.dt = 0.1; // far beyond the advective CFL of the initial profile
    const RunResult res = run(cfg);
    REQUIRE(res.completed);
    // rows keep strictly increasing t and reach the final time
    CHECK(res.series.last("t") == doctest::Approx(0.25).epsilon(1e-9));
    for (size_t r = 1; r < res.series.rows.size(); ++r)
        CHECK(res.series.rows[r][0] > res.series.rows[r - 1][0]);
}

TEST_CASE("reports land in the output directory") {
    BenchmarkConfig cfg = make_membrane_config("BS3", 16, 1.0);
    cfg.final_time = 0.02;
    cfg.membrane_tracers = 200;
    cfg.out_dir = "test_report_out";
    const RunResult res = run(cfg);
    REQUIRE(res.completed);
    namespace fs = std::filesystem;
    CHECK(fs::exists("test_report_out/series.csv"));
    CHECK(fs::exists("test_report_out/series.svg"));
    CHECK(fs::exists("test_report_out/field.txt"));
    CHECK(fs::exists("test_report_out/run_summary.json"));
    CHECK(fs::exists("test_report_out/membrane_0_positions.csv"));
    fs::remove_all("test_report_out");
}

TEST_CASE("property suite passes at reduced sampling") {
    const auto results = run_property_suite(6, 100);
    for (const auto& r : results) {
        INFO(r.name << " worst=" << r.worst << " tol=" << r.tol);
        CHECK(r.pass);
    }
}
