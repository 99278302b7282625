#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "landau/config.hpp"
#include "landau/errors.hpp"
#include "landau/harness.hpp"

using namespace landau;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("landau_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
    const auto c = parse_config("[momentum]\npoints_per_axis = 10\nradius = 5.5\n[sweep]\nepsilons = 0.2, 0.1,0.05, 0.01\n[solver]\nimex_order = 2\n");
    CHECK(c.momentum_points_per_axis == 10);
    CHECK(c.momentum_radius == 5.5);
    CHECK(c.sweep_epsilons == std::vector<double>{0.2, 0.1, 0.05, 0.01});
    CHECK(c.solver_imex_order == 2);
    CHECK(c.space_cells == RunConfig{}.space_cells);
    const auto top = parse_config("seed = 42\noutput_dir = results\n");
    CHECK(top.seed == 42u);
    CHECK(top.output_dir == "results");
}

TEST_CASE("config rejects unknown keys and bad values") {
    CHECK_THROWS_AS(parse_config("[momentum]\npoints = 8\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[bogus]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[momentum]\nradius = six\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[momentum]\npoints_per_axis = 9\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[sweep]\nepsilons = 0.1, 0.2, 0.05\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[sweep]\nepsilons = 0.1, 0.05\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[solver]\nimex_order = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[solver]\ntau_init = 1.0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("seed = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[momentum\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/run.ini"), ConfigError);
}

TEST_CASE("canonical text and hash") {
    RunConfig a, b;
    CHECK(config_hash(a) == config_hash(b));
    b.output_dir = "elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 1;
    CHECK(config_hash(a) != config_hash(b));
    // the canonical text parses back to the same configuration
    CHECK(canonical_text(parse_config(canonical_text(a))) == canonical_text(a));
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
}

TEST_CASE("CSV and check rows round trip") {
    CsvTable t({"x", "y"});
    t.row({CsvTable::num(0.1), CsvTable::num(3)});
    CHECK(t.text() == "x,y\n0.1,3\n");
    CHECK_THROWS_AS(t.row({"1"}), std::logic_error);
    CHECK(CsvTable({"epsilon", "t"}).text() == "epsilon,t\n");

    const std::vector<CheckRow> rows{check_le("a", 1e-12, 1e-10, 1), check_ge("b", -1.0, 0.0, 4), check_in("c", 1.0, 0.7, 1.3, 7),
                                     info_row("d", 2.5)};
    CHECK(rows[0].pass == "pass");
    CHECK(rows[1].pass == "fail");
    CHECK(rows[2].pass == "pass");
    CHECK(rows[3].pass == "info");
    CHECK(check_le("nan", std::numeric_limits<double>::quiet_NaN(), 1.0, 2).pass == "fail");
    const auto back = parse_checks_csv(checks_csv(rows));
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].check == rows[i].check);
        CHECK(back[i].value == rows[i].value);
        CHECK(back[i].threshold == rows[i].threshold);
        CHECK(back[i].pass == rows[i].pass);
        CHECK(back[i].criterion == rows[i].criterion);
    }
}

TEST_CASE("plots are deterministic and carry every series") {
    const std::vector<Series> s{{"eps=0.1", {0, 0.1, 0.2}, {1e-4, 2e-4, 1.5e-4}},
                                {"eps=0.05", {0, 0.1, 0.2}, {3e-5, 5e-5, 4e-5}},
                                {"eps=0.025", {0, 0.1, 0.2}, {1e-5, 2e-5, 1e-5}}};
    const auto a = svg_plot("t", "x", "y", s, false, true, "slope = 1.02");
    CHECK(a == svg_plot("t", "x", "y", s, false, true, "slope = 1.02"));
    CHECK(a.find("slope = 1.02") != std::string::npos);
    std::size_t lines = 0;
    for (std::size_t p = a.find("<polyline"); p != std::string::npos; p = a.find("<polyline", p + 1)) ++lines;
    CHECK(lines == 3);
    CHECK_NOTHROW(svg_plot("empty", "x", "y", {}, true, true));
}

TEST_CASE("artifacts: every output is in the manifest") {
    const auto dir = scratch("artifacts");
    RunConfig cfg;
    Artifacts art(dir.string(), "unit", cfg);
    art.write("a.csv", "x\n1\n");
    art.write("b.txt", "hello\n");
    art.write("a.csv", "x\n2\n");
    art.finish();
    const auto m = nlohmann::json::parse(slurp(dir / "manifest_unit.json"));
    CHECK(m["config_hash"] == config_hash(cfg));
    REQUIRE(m["outputs"].size() == 2);
    CHECK(m["outputs"][0]["file"] == "a.csv");
    CHECK(m["outputs"][0]["sha256"] == sha256_hex("x\n2\n"));
    for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().extension() != ".tmp");
    fs::remove_all(dir);
}

TEST_CASE("pipeline prerequisites") {
    RunConfig cfg;
    cfg.output_dir = scratch("prereq").string();
    CHECK_THROWS_AS(run_knudsen_sweep(cfg), PrerequisiteMissing);
    CHECK_THROWS_AS(run_report(cfg), PrerequisiteMissing);
    // a truncated snapshot and one from another grid are refused as well
    fs::create_directories(cfg.output_dir);
    const auto bin = fs::path(cfg.output_dir) / "hilbert.bin";
    std::ofstream(bin, std::ios::binary) << "LANDAUH";
    CHECK_THROWS_AS(run_knudsen_sweep(cfg), PrerequisiteMissing);
    HilbertData d;
    d.points_per_axis = 8;
    d.radius = 6.0;
    d.cells = 4;
    d.length = 1.0;
    d.tau = 0.1;
    d.save(bin.string());
    CHECK_THROWS_AS(run_knudsen_sweep(cfg), PrerequisiteMissing);
    d.levels.resize(1);
    CHECK_THROWS_AS(d.save(bin.string()), std::invalid_argument);
    fs::remove_all(cfg.output_dir);
}

TEST_CASE("sweep checks follow the thresholds") {
    SweepResult res;
    res.epsilons = {0.1, 0.05, 0.025};
    for (double e : res.epsilons) {
        RunSeries r;
        r.epsilon = e;
        r.sup_h2 = e;
        r.peak_M = 1.0;
        r.min_F0 = 0.0;
        r.min_F = -1e-9;
        res.runs.push_back(r);
        r.C_fit = 0.0;
        res.halved.push_back(r);
    }
    res.slope = 1.0;
    auto rows = sweep_checks(res);
    for (const auto& r : rows)
        if (r.criterion) CHECK_MESSAGE(r.pass == "pass", r.check);
    res.runs[0].min_F = -1e-7;
    res.runs[1].C_fit = 1.0;
    res.slope = 1.6;
    int fails = 0;
    for (const auto& r : sweep_checks(res)) fails += r.pass == "fail";
    CHECK(fails == 3);
}
