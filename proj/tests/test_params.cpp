#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "cda/params.hpp"

using namespace cda;

TEST_CASE("defaults carry the documented values") {
    const StrategyParams p = StrategyParams::defaults();
    CHECK(p.get("zip.beta_min") == 0.1);
    CHECK(p.get("zip.beta_max") == 0.5);
    CHECK(p.get("zip.momentum_min") == 0.0);
    CHECK(p.get("zip.momentum_max") == 0.1);
    CHECK(p.get("zip.margin_init_min") == 0.05);
    CHECK(p.get("zip.margin_init_max") == 0.35);
    CHECK(p.get("zip.ca") == 0.05);
    CHECK(p.get("zip.cr") == 0.05);
    CHECK(p.get("gdx.gamma") == 0.9);
    CHECK(p.get_int("gdx.history_window") == 50);
    CHECK(p.get_int("gdx.max_horizon") == 8);
    CHECK(p.get_int("aa.eq_window") == 5);
    CHECK(p.get("aa.eq_decay") == 0.95);
    CHECK(p.get("aa.beta_short_min") == 0.1);
    CHECK(p.get("aa.beta_short_max") == 0.5);
    CHECK(p.get("aa.beta_long_min") == 0.1);
    CHECK(p.get("aa.beta_long_max") == 0.5);
    CHECK(p.get("aa.theta_init") == -2.0);
    CHECK(p.get("aa.theta_min") == -8.0);
    CHECK(p.get("aa.theta_max") == 2.0);
    CHECK(p.get("aa.theta_gamma") == 2.0);
    CHECK(p.get("aa.lambda_rel") == 0.05);
    CHECK(p.get("aa.lambda_abs") == 0.05);
    CHECK(p.get("aa.eta") == 3.0);
    CHECK(p.get("aa.r_init_min") == -0.3);
    CHECK(p.get("aa.r_init_max") == 0.0);
    CHECK(p.get("aa.cold_start_margin") == 0.10);
}

TEST_CASE("the shipped default params file restates the built-in defaults") {
    const auto path = std::filesystem::path(CDA_SOURCE_DIR) / "params" / "default.params";
    const StrategyParams file = StrategyParams::from_file(path);
    const StrategyParams builtin = StrategyParams::defaults();
    CHECK(file.values() == builtin.values());
    CHECK(file.hash() == builtin.hash());
}

TEST_CASE("from_string applies overrides and tolerates comments and spacing") {
    const StrategyParams p = StrategyParams::from_string(
        "# comment line\n"
        "\n"
        "  zip.ca = 0.5   # trailing comment\n"
        "gdx.max_horizon=4\n");
    CHECK(p.get("zip.ca") == 0.5);
    CHECK(p.get_int("gdx.max_horizon") == 4);
    CHECK(p.get("zip.cr") == 0.05);  // untouched keys keep defaults
}

TEST_CASE("the key set is closed and values are checked") {
    CHECK_THROWS_AS((void)StrategyParams::from_string("zip.novel_knob = 1\n"), ParamsError);
    CHECK_THROWS_AS((void)StrategyParams::from_string("zip.ca\n"), ParamsError);
    CHECK_THROWS_AS((void)StrategyParams::from_string("zip.ca = banana\n"), ParamsError);
    CHECK_THROWS_AS((void)StrategyParams::from_string("zip.ca = 0.5x\n"), ParamsError);
    CHECK_THROWS_AS((void)StrategyParams::from_string("gdx.gamma = 1.5\n"), ParamsError);
    CHECK_THROWS_AS((void)StrategyParams::from_string("gdx.history_window = 0\n"), ParamsError);
    CHECK_THROWS_AS(
        (void)StrategyParams::from_string("zip.beta_min = 0.9\nzip.beta_max = 0.2\n"),
        ParamsError);

    StrategyParams p = StrategyParams::defaults();
    CHECK_THROWS_AS(p.set("aa.unknown", 1.0), ParamsError);
    CHECK_THROWS_AS((void)p.get("nope"), ParamsError);
    p.set("aa.eta", 5.0);
    CHECK(p.get("aa.eta") == 5.0);
}

TEST_CASE("missing files are reported") {
    CHECK_THROWS_AS((void)StrategyParams::from_file("/nonexistent/params.txt"), ParamsError);
}

TEST_CASE("serialization is canonical and round-trips") {
    StrategyParams p = StrategyParams::defaults();
    p.set("zip.ca", 0.123);
    const std::string body = p.serialize();

    // Sorted keys, one per line, key = value.
    std::string prev;
    std::istringstream in(body);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        ++lines;
        const auto eq = line.find(" = ");
        REQUIRE(eq != std::string::npos);
        const std::string key = line.substr(0, eq);
        CHECK(prev < key);
        prev = key;
    }
    CHECK(lines == static_cast<int>(p.values().size()));

    const StrategyParams back = StrategyParams::from_string(body);
    CHECK(back.values() == p.values());
    CHECK(back.hash() == p.hash());
}

TEST_CASE("hashes are stable for equal values and move when a value moves") {
    const StrategyParams a = StrategyParams::defaults();
    const StrategyParams b = StrategyParams::defaults();
    CHECK(a.hash() == b.hash());
    StrategyParams c = StrategyParams::defaults();
    c.set("aa.eta", 4.0);
    CHECK(c.hash() != a.hash());
}

TEST_CASE("get_int rounds to the nearest integer") {
    StrategyParams p = StrategyParams::defaults();
    p.set("gdx.history_window", 49.6);
    CHECK(p.get_int("gdx.history_window") == 50);
    p.set("gdx.history_window", 49.4);
    CHECK(p.get_int("gdx.history_window") == 49);
}
