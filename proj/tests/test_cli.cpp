#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "hpz/error.hpp"
#include "output.hpp"
#include "scenario.hpp"

using namespace hpz;
using namespace hpz::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json spread_config() {
    return json::parse(R"({"name":"t","physical":{"mass":1,"bath_kind":"ohmic","friction":1,"temperature":1,
        "regime":"high"},"state":{"kind":"gaussian","sigma":1},
        "time_grid":{"t_start":0,"t_end":1,"n_points":5}})");
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("hpz_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string read(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_config(const fs::path& dir, const json& j) {
    const auto p = dir / "config.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

}  // namespace

TEST_CASE("scenario parsing and diagnostics") {
    const auto s = parse_scenario(spread_config());
    CHECK(s.time.points().size() == 5);
    CHECK(s.time.points().back() == doctest::Approx(1.0));

    auto j = spread_config();
    j["physical"].erase("friction");
    try {
        parse_scenario(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("friction") != std::string::npos);
    }

    j = spread_config();
    j["bogus"] = 1;
    CHECK_THROWS_AS(parse_scenario(j), ConfigError);

    auto dir = scratch("malformed");
    std::ofstream(dir / "bad.json") << "{\n  \"name\": \n}";
    try {
        load_scenario((dir / "bad.json").string());
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
}

TEST_CASE("csv format round trip") {
    Table t{"x", {"a", "b"}, {}};
    t.add({0.1, std::nan("")});
    t.add({1e-300, -2.5});
    const auto text = to_csv(t);
    CHECK(text.substr(0, 4) == "a,b\n");
    CHECK(text.find("nan") != std::string::npos);
    const auto back = parse_csv(text, "x");
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[0][0] == 0.1);
    CHECK(std::isnan(back.rows[0][1]));
    CHECK(back.rows[1][0] == 1e-300);
    CHECK(format_number(1.0 / 3.0) == "3.3333333333333331e-01");
}

TEST_CASE("execute writes deterministic outputs and a manifest") {
    auto dir = scratch("run");
    const auto cfg = write_config(dir, spread_config());
    RunOptions a, b;
    a.out_dir = dir / "a";
    b.out_dir = dir / "b";
    std::ostringstream err;
    REQUIRE(execute("spread", cfg.string(), a, err) == 0);
    REQUIRE(execute("spread", cfg.string(), b, err) == 0);
    CHECK(read(a.out_dir / "spread.csv") == read(b.out_dir / "spread.csv"));
    const auto manifest = json::parse(read(a.out_dir / "manifest.json"));
    CHECK(manifest.contains("code_version"));
    CHECK(manifest.contains("wall_clock_s"));
    CHECK(fs::exists(a.out_dir / "summary.json"));

    const auto diff = compare_runs(a.out_dir, b.out_dir);
    CHECK(diff.dump().find("nan") == std::string::npos);

    auto other = spread_config();
    other["time_grid"]["n_points"] = 7;
    const auto cfg2 = write_config(dir / "a", other);
    RunOptions c;
    c.out_dir = dir / "c";
    REQUIRE(execute("spread", cfg2.string(), c, err) == 0);
    CHECK_THROWS_AS(compare_runs(a.out_dir, c.out_dir), ConfigError);
}

TEST_CASE("execute exit codes") {
    auto dir = scratch("codes");
    RunOptions o;
    o.out_dir = dir / "out";
    std::ostringstream err;
    CHECK(execute("spread", (dir / "missing.json").string(), o, err) == 1);

    auto j = spread_config();
    j["physical"]["regime"] = "zero";
    j["physical"]["temperature"] = 0;
    const auto cfg = write_config(dir, j);
    err.str("");
    CHECK(execute("fluctuations", cfg.string(), o, err) == 1);
    CHECK_FALSE(err.str().empty());
}
