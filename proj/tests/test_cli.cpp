#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cda/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Runs cli_main in-process with stdout/stderr captured.
struct CliRun {
    int exit_code = 0;
    std::string out, err;
};

CliRun run_cli(std::vector<std::string> args) {
    std::vector<const char*> argv{"cda-arena"};
    for (const std::string& a : args) argv.push_back(a.c_str());

    std::ostringstream out, err;
    std::streambuf* old_out = std::cout.rdbuf(out.rdbuf());
    std::streambuf* old_err = std::cerr.rdbuf(err.rdbuf());
    CliRun r;
    r.exit_code = cda::cli_main(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path fresh_dir(const char* tag) {
    const fs::path p = fs::temp_directory_path() / (std::string("cda_cli_") + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int count_tmp_files(const fs::path& root) {
    int n = 0;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.path().extension() == ".tmp") ++n;
    return n;
}

const std::string kFixture =
    std::string(CDA_SOURCE_DIR) + "/fixtures/pairwise_wins_static_sync.csv";

}  // namespace

TEST_CASE("exactly one mode flag is required") {
    CHECK(run_cli({}).exit_code == 1);
    CHECK(run_cli({"--pair", "AA:ZIC", "--all-pairs"}).exit_code == 1);
    const CliRun r = run_cli({"--pair", "AA:ZIC", "--fixture-graph", kFixture});
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("exactly one of") != std::string::npos);
    CHECK(run_cli({"--help"}).exit_code == 0);
    CHECK(run_cli({"--no-such-flag"}).exit_code == 1);
    CHECK(run_cli({"--pair", "AA:ZIC", "--engine", "turbo"}).exit_code == 1);
    CHECK(run_cli({"--pair", "AA:ZIC", "--sessions", "0"}).exit_code == 1);
}

TEST_CASE("malformed pair and ratio arguments are usage errors") {
    const fs::path out = fresh_dir("badargs");
    const std::string out_arg = out.string();
    const CliRun bad_pair = run_cli({"--pair", "AA-ZIC", "--out", out_arg});
    CHECK(bad_pair.exit_code == 1);
    CHECK(bad_pair.err.find("bad --pair") != std::string::npos);
    CHECK(run_cli({"--pair", "AA:WAT", "--out", out_arg}).exit_code == 1);
    CHECK(run_cli({"--pair", "AAZIC", "--out", out_arg}).exit_code == 1);

    for (const char* ratios : {"0:20", "5:5", "21:-1", ",1:19", "garbage", ""}) {
        const CliRun r = run_cli({"--pair", "AA:ZIC", "--ratios", ratios, "--out", out_arg});
        CHECK(r.exit_code == 1);
        CHECK(r.err.find("bad --ratios") != std::string::npos);
    }
    // Usage errors must not leave output behind.
    CHECK(fs::is_empty(out));
}

TEST_CASE("fixture graph mode renders a dot file without simulating") {
    const fs::path out = fresh_dir("graph");
    const CliRun r = run_cli({"--fixture-graph", kFixture, "--out", out.string()});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("AA in/out 0/5") != std::string::npos);
    CHECK(r.out.find("ZIC in/out 5/0") != std::string::npos);
    CHECK(r.out.find("wrote ") != std::string::npos);
    const std::string dot = slurp(out / "dominance.dot");
    CHECK(dot.find("digraph dominance") != std::string::npos);
    CHECK(dot.find("AA -> ZIC") != std::string::npos);
    CHECK(count_tmp_files(out) == 0);

    CHECK(run_cli({"--fixture-graph", "/no/such/file.csv", "--out", out.string()}).exit_code == 1);

    const fs::path bad = out / "bad_totals.csv";
    std::ofstream(bad) << "algo_a,algo_b,engine,treatment,wins_a,wins_b,draws\n"
                          "AA,ZIC,sync,static,1,2,0\n";  // 14 pairs missing
    const CliRun incomplete = run_cli({"--fixture-graph", bad.string(), "--out", out.string()});
    CHECK(incomplete.exit_code == 1);
    CHECK(incomplete.err.find("missing pairs") != std::string::npos);
}

TEST_CASE("a pair contest writes sessions, totals and a manifest") {
    const fs::path out = fresh_dir("pair");
    const CliRun r = run_cli({"--pair", "GVWY:SHVR", "--ratios", "1:19", "--sessions", "2",
                              "--seed", "9", "--workers", "2", "--out", out.string()});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("contest GVWY:SHVR sync static wins ") != std::string::npos);

    const fs::path dir = out / "GVWY_SHVR" / "sync" / "static";
    const std::string sessions = slurp(dir / "sessions.csv");
    CHECK(sessions.find("# params_hash=") == 0);
    CHECK(sessions.find("GVWY:SHVR,sync,static,1,19,0,") != std::string::npos);
    CHECK(sessions.find("GVWY:SHVR,sync,static,1,19,1,") != std::string::npos);
    CHECK(std::count(sessions.begin(), sessions.end(), '\n') == 2 + 2);

    const std::string totals = slurp(dir / "totals.csv");
    CHECK(totals.find("GVWY,SHVR,sync,static,") != std::string::npos);
    CHECK(slurp(out / "totals.csv") == totals);

    const json manifest = json::parse(slurp(out / "manifest.json"));
    CHECK(manifest.at("tool") == "cda-arena");
    CHECK(manifest.at("mode") == "pair");
    CHECK(manifest.at("base_seed") == 9);
    CHECK(manifest.at("flags").at("ratios") == "1:19");
    CHECK(manifest.at("flags").at("workers") == 2);
    REQUIRE(manifest.at("contests").size() == 1);
    const json& c = manifest.at("contests").at(0);
    CHECK(c.at("pair") == "GVWY:SHVR");
    CHECK(c.at("status") == "ok");
    CHECK(c.at("wins_a").get<long long>() + c.at("wins_b").get<long long>() +
              c.at("draws").get<long long>() ==
          2);
    // params_hash comment in the totals file matches the manifest.
    const std::string hash_line = "# params_hash=" + manifest.at("params_hash").get<std::string>();
    CHECK(totals.find(hash_line) == 0);
    CHECK(count_tmp_files(out) == 0);

    // Same invocation replayed: byte-identical session and totals files.
    const fs::path out2 = fresh_dir("pair_replay");
    CHECK(run_cli({"--pair", "GVWY:SHVR", "--ratios", "1:19", "--sessions", "2", "--seed", "9",
                   "--workers", "2", "--out", out2.string()})
              .exit_code == 0);
    CHECK(slurp(out2 / "GVWY_SHVR" / "sync" / "static" / "sessions.csv") == sessions);
    CHECK(slurp(out2 / "totals.csv") == totals);
}

TEST_CASE("strategy parameter files load or fail cleanly") {
    const fs::path out = fresh_dir("params");
    const std::string defaults = std::string(CDA_SOURCE_DIR) + "/params/default.params";
    const CliRun ok = run_cli({"--pair", "GVWY:SHVR", "--ratios", "19:1", "--sessions", "1",
                               "--params", defaults, "--out", out.string()});
    CHECK(ok.exit_code == 0);
    const json manifest = json::parse(slurp(out / "manifest.json"));
    CHECK(manifest.at("flags").at("params") == defaults);

    const fs::path bad = out / "bad.params";
    std::ofstream(bad) << "zip.beta_min = not_a_number\n";
    const CliRun malformed = run_cli({"--pair", "GVWY:SHVR", "--ratios", "19:1", "--sessions",
                                      "1", "--params", bad.string(), "--out", out.string()});
    CHECK(malformed.exit_code == 1);
    CHECK(malformed.err.find("error:") != std::string::npos);

    const fs::path unknown = out / "unknown.params";
    std::ofstream(unknown) << "zap.beta = 0.5\n";
    CHECK(run_cli({"--pair", "GVWY:SHVR", "--ratios", "19:1", "--sessions", "1", "--params",
                   unknown.string(), "--out", out.string()})
              .exit_code == 1);

    CHECK(run_cli({"--pair", "GVWY:SHVR", "--params", "/no/such.params", "--out", out.string()})
              .exit_code == 1);
}

TEST_CASE("the output directory falls back to CDA_ARENA_OUT") {
    const fs::path out = fresh_dir("envout");
    setenv("CDA_ARENA_OUT", out.string().c_str(), 1);
    const CliRun r = run_cli({"--fixture-graph", kFixture});
    unsetenv("CDA_ARENA_OUT");
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(out / "dominance.dot"));
}

TEST_CASE("async contests record order arrival latency") {
    const fs::path out = fresh_dir("async");
    const CliRun r = run_cli({"--pair", "GVWY:SHVR", "--engine", "async", "--ratios", "10:10",
                              "--sessions", "1", "--out", out.string()});
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("contest GVWY:SHVR async static wins ") != std::string::npos);
    const fs::path dir = out / "GVWY_SHVR" / "async" / "static";
    const std::string latency = slurp(dir / "latency.csv");
    CHECK(latency.find("trader_id,strategy,snapshot_time,order_arrival_time\n") == 0);
    CHECK(std::count(latency.begin(), latency.end(), '\n') > 10);
    CHECK(fs::exists(dir / "sessions.csv"));
    CHECK(count_tmp_files(out) == 0);
}
