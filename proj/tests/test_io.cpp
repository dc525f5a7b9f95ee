#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "extremo/csv.hpp"
#include "extremo/pipeline.hpp"
#include "extremo/rng.hpp"

using namespace extremo;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("extremo_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("format_double round trips") {
    Rng rng(81);
    for (int k = 0; k < 20000; ++k) {
        const double x = rng.normal() * std::exp(40.0 * (rng.uniform01() - 0.5));
        const std::string s = format_double(x);
        CHECK(std::stod(s) == x);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-6) == "1e-06");
}

TEST_CASE("csv write/load is lossless") {
    const fs::path dir = temp_dir("roundtrip");
    SeriesTable t;
    t.names = {"r1", "r2"};
    t.columns.assign(2, {});
    Rng rng(82);
    for (int i = 0; i < 500; ++i) {
        t.columns[0].push_back(rng.normal() * 1e-4);
        t.columns[1].push_back(rng.normal() * std::exp(10 * (rng.uniform01() - 0.5)));
    }
    write_csv(dir / "x.csv", t);
    const SeriesTable back = load_series(dir / "x.csv", {"r1", "r2"});
    REQUIRE(back.rows() == 500);
    for (int i = 0; i < 500; ++i) {
        CHECK(back.columns[0][static_cast<size_t>(i)] == t.columns[0][static_cast<size_t>(i)]);
        CHECK(back.columns[1][static_cast<size_t>(i)] == t.columns[1][static_cast<size_t>(i)]);
    }
}

TEST_CASE("load_series column handling") {
    const fs::path dir = temp_dir("columns");

    SUBCASE("two plain numeric columns") {
        std::ofstream out(dir / "a.csv");
        out << "r1,r2\n";
        for (int i = 0; i < 10; ++i) out << i << "," << 2 * i << "\n";
        out.close();
        const SeriesTable t = load_series(dir / "a.csv");
        CHECK(t.columns.size() == 2);
        CHECK(t.rows() == 10);
        CHECK(t.timestamp_name.empty());
    }

    SUBCASE("timestamp column preserved when not selected") {
        std::ofstream out(dir / "b.csv");
        out << "time,r1,r2\n";
        for (int i = 0; i < 5; ++i) out << "2026-01-0" << i + 1 << "," << i << "," << i * i << "\n";
        out.close();
        const SeriesTable t = load_series(dir / "b.csv", {"r1", "r2"});
        CHECK(t.columns.size() == 2);
        CHECK(t.timestamp_name == "time");
        REQUIRE(t.timestamps.size() == 5);
        CHECK(t.timestamps[2] == "2026-01-03");

        // Echoed on write.
        write_csv(dir / "b_out.csv", t);
        const SeriesTable back = load_series(dir / "b_out.csv", {"r1", "r2"});
        CHECK(back.timestamps == t.timestamps);
    }

    SUBCASE("leading non-numeric column auto-detected without a selection") {
        std::ofstream out(dir / "c.csv");
        out << "stamp,v\n";
        out << "a,1\nb,2\nc,3\n";
        out.close();
        const SeriesTable t = load_series(dir / "c.csv");
        CHECK(t.columns.size() == 1);
        CHECK(t.timestamp_name == "stamp");
    }

    SUBCASE("malformed cell names its data row") {
        std::ofstream out(dir / "d.csv");
        out << "r1,r2\n";
        for (int i = 1; i <= 10; ++i) {
            if (i == 7)
                out << "0.5,oops\n";
            else
                out << "0.5,0.25\n";
        }
        out.close();
        try {
            load_series(dir / "d.csv", {"r1", "r2"});
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.row == 7);
            CHECK(e.column == "r2");
        }
    }

    SUBCASE("missing file and empty file") {
        CHECK_THROWS_AS(load_series(dir / "nope.csv"), FileNotFound);
        std::ofstream(dir / "empty.csv") << "r1,r2\n";
        CHECK_THROWS_AS(load_series(dir / "empty.csv"), EmptySeries);
    }

    SUBCASE("short row names its data row") {
        std::ofstream out(dir / "short.csv");
        out << "r1,r2\n1,2\n3\n";
        out.close();
        try {
            load_series(dir / "short.csv", {"r1", "r2"});
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.row == 2);
            CHECK(e.column == "r2");
        }
    }
}

TEST_CASE("run_command simulate writes a loadable series and a reusable manifest") {
    const fs::path dir = temp_dir("cmd_sim");
    json cfg;
    cfg["command"] = "simulate";
    cfg["seed"] = 99;
    cfg["simulate"] = {{"n", 500},
                       {"burn_in", 50},
                       {"model",
                        {{"a0", {1e-6, 1e-6}},
                         {"alpha", {{0.1, 0.0}, {0.0, 0.1}}},
                         {"beta", {{0.8, 0.0}, {0.0, 0.8}}}}},
                       {"innovation", {{"family", "student_t"}, {"df", 10.0}, {"rho", 0.7}}}};
    const json manifest = run_command(cfg, dir);
    CHECK(fs::exists(dir / "series.csv"));
    CHECK(fs::exists(dir / "manifest.json"));
    const SeriesTable t = load_series(dir / "series.csv", {"x1", "x2"});
    CHECK(t.rows() == 500);

    // Manifest re-run is byte-identical.
    const fs::path dir2 = temp_dir("cmd_sim2");
    run_command(manifest, dir2);
    CHECK(slurp(dir / "series.csv") == slurp(dir2 / "series.csv"));
    CHECK(slurp(dir / "manifest.json") == slurp(dir2 / "manifest.json"));
}

TEST_CASE("run_command extremogram/bands on a small simulated file") {
    const fs::path sim_dir = temp_dir("cmd_ext_in");
    json sim;
    sim["command"] = "simulate";
    sim["seed"] = 7;
    sim["simulate"] = {{"n", 3000},
                       {"burn_in", 100},
                       {"model",
                        {{"a0", {1e-6, 1e-6}},
                         {"alpha", {{0.1, 0.0}, {0.0, 0.1}}},
                         {"beta", {{0.8, 0.0}, {0.0, 0.8}}}}},
                       {"innovation", {{"family", "gaussian"}, {"rho", 0.5}}}};
    run_command(sim, sim_dir);

    const fs::path out = temp_dir("cmd_ext_out");
    json cfg;
    cfg["command"] = "bands";
    cfg["seed"] = 8;
    cfg["input"] = {{"path", (sim_dir / "series.csv").string()},
                    {"columns", {"x1", "x2"}}};
    cfg["extremogram"] = {{"quantile", 0.95}, {"max_lag", 10}, {"n_perm", 20}};
    const json manifest = run_command(cfg, out);
    CHECK(fs::exists(out / "extremogram.csv"));
    const SeriesTable t = load_series(out / "extremogram.csv");
    CHECK(t.rows() == 11);
    CHECK(t.columns.size() == 9);
    CHECK(manifest.at("summary").contains("exceed_counts"));

    const fs::path out2 = temp_dir("cmd_ext_out2");
    run_command(manifest, out2);
    CHECK(slurp(out / "extremogram.csv") == slurp(out2 / "extremogram.csv"));
}

TEST_CASE("pipeline errors carry stage labels") {
    const fs::path dir = temp_dir("pipeline_err");
    std::ofstream(dir / "empty.csv") << "r1,r2\n";
    json cfg;
    cfg["command"] = "pipeline";
    cfg["seed"] = 1;
    cfg["input"] = {{"path", (dir / "empty.csv").string()}, {"columns", {"r1", "r2"}}};
    try {
        run_command(cfg, dir / "out");
        FAIL("expected a stage-labeled error");
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        CHECK(msg.find("[load]") != std::string::npos);
        CHECK(msg.find("no data rows") != std::string::npos);
    }
}

TEST_CASE("pipeline command with VAR pre-whitening runs end to end") {
    const fs::path dir = temp_dir("pipeline_var");
    json cfg;
    cfg["command"] = "pipeline";
    cfg["seed"] = 404;
    cfg["simulate"] = {{"n", 6000},
                       {"burn_in", 200},
                       {"model",
                        {{"a0", {1e-6, 1e-6}},
                         {"alpha", {{0.1, 0.0}, {0.05, 0.1}}},
                         {"beta", {{0.8, 0.03}, {0.0, 0.8}}}}},
                       {"innovation", {{"family", "student_t"}, {"df", 10.0}, {"rho", 0.7}}}};
    cfg["var"] = {{"enabled", true}, {"max_order", 5}, {"criterion", "schwarz"}};
    cfg["extremogram"] = {{"quantile", 0.97}, {"max_lag", 15}, {"n_perm", 30}};
    const json manifest = run_command(cfg, dir);

    for (const char* name :
         {"series.csv", "var.json", "var_residuals.csv", "fit.json", "residuals.csv",
          "extremogram_raw.csv", "extremogram_residuals.csv", "qq_1.csv", "qq_2.csv", "acf.csv",
          "clock_profile.csv", "manifest.json"})
        CHECK(fs::exists(dir / name));

    // Residual reconstruction holds on the written arrays: sigma * z == input to the fit.
    const SeriesTable res = load_series(dir / "residuals.csv");
    const SeriesTable var_res = load_series(dir / "var_residuals.csv");
    REQUIRE(res.rows() == var_res.rows());
    for (size_t t = 0; t < res.rows(); ++t) {
        CHECK(res.columns[0][t] * res.columns[2][t] == var_res.columns[0][t]);
        CHECK(res.columns[1][t] * res.columns[3][t] == var_res.columns[1][t]);
    }

    // Manifest re-run reproduces everything byte for byte.
    const fs::path dir2 = temp_dir("pipeline_var2");
    run_command(manifest, dir2);
    for (const auto& f : manifest.at("outputs"))
        CHECK(slurp(dir / f.get<std::string>()) == slurp(dir2 / f.get<std::string>()));
}

TEST_CASE("config merging keeps explicit values and fills defaults") {
    json user;
    user["command"] = "bands";
    user["extremogram"] = {{"quantile", 0.9}};
    const json merged = merge_config(default_config("bands"), user);
    CHECK(merged.at("extremogram").at("quantile") == 0.9);
    CHECK(merged.at("extremogram").at("n_perm") == 100);
    CHECK(merged.at("extremogram").at("band_quantile") == 0.96);
    CHECK(merged.at("seed") == 1);
}
