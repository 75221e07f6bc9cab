#include "cda/cli.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cda/csv.hpp"
#include "cda/experiments.hpp"

namespace cda {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string now_utc() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string hex_hash(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::optional<std::pair<Strategy, Strategy>> parse_pair(const std::string& arg) {
    const auto colon = arg.find(':');
    if (colon == std::string::npos) return std::nullopt;
    const auto a = parse_strategy(arg.substr(0, colon));
    const auto b = parse_strategy(arg.substr(colon + 1));
    if (!a || !b) return std::nullopt;
    return std::make_pair(*a, *b);
}

std::optional<std::vector<Ratio>> parse_ratios(const std::string& arg, int n_per_side) {
    if (arg == "all") return std::vector<Ratio>{};  // run_contest expands
    std::vector<Ratio> out;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
        int a = 0, b = 0;
        char sep = 0;
        std::stringstream rs(item);
        if (!(rs >> a >> sep >> b) || sep != ':' || a < 1 || b < 1 || a + b != n_per_side)
            return std::nullopt;
        out.push_back({a, b});
    }
    if (out.empty()) return std::nullopt;
    return out;
}

std::string pair_dir_name(Strategy a, Strategy b) {
    return std::string(to_cstr(a)) + "_" + to_cstr(b);
}

// Drops the header line, keeping the data rows.
std::string csv_body(const std::string& csv) {
    const auto nl = csv.find('\n');
    return nl == std::string::npos ? std::string() : csv.substr(nl + 1);
}

struct CliOptions {
    std::string pair_arg, fixture_file, params_file, out_dir, ratios_arg = "all";
    std::string engine = "sync", p0 = "static";
    bool all_pairs = false;
    int sessions = 100;
    int workers = 1;
    std::uint64_t seed = 1;
};

int run_fixture_graph(const CliOptions& opt) {
    std::ifstream in(opt.fixture_file);
    if (!in) {
        std::cerr << "error: cannot open fixture file " << opt.fixture_file << "\n";
        return 1;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    DominanceGraph g;
    try {
        g = build_dominance_graph(parse_totals_csv(buf.str()));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    try {
        write_file_atomic(fs::path(opt.out_dir) / "dominance.dot", dominance_dot(g));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    for (const Strategy s : all_strategies)
        std::cout << to_cstr(s) << " in/out " << g.indegree.at(s) << "/" << g.outdegree.at(s)
                  << "\n";
    std::cout << "wrote " << (fs::path(opt.out_dir) / "dominance.dot").string() << "\n";
    return 0;
}

struct ContestOutcome {
    PairTotals totals;
    std::string status = "ok";
    double seconds = 0.0;
};

ContestOutcome run_and_write_contest(const CliOptions& opt, Strategy a, Strategy b,
                                     const StrategyParams& params) {
    const auto t0 = std::chrono::steady_clock::now();
    ContestSpec spec;
    spec.strategy_a = a;
    spec.strategy_b = b;
    spec.sessions_per_ratio = opt.sessions;
    spec.use_async = opt.engine == "async";
    spec.dynamic_p0 = opt.p0 == "dynamic";
    spec.base_seed = opt.seed;
    spec.workers = opt.workers;
    spec.session.params = params;
    spec.session.collect_latency = spec.use_async;
    const auto ratios = parse_ratios(opt.ratios_arg, spec.n_per_side);
    spec.ratios = *ratios;  // validated before dispatch

    std::string latency_rows;
    const SessionHook hook = [&](const SessionRecord&, const SessionResult& sr) {
        if (!sr.latency.empty()) latency_rows += csv_body(latency_csv(sr));
    };
    const ContestResult result = run_contest(spec, spec.use_async ? hook : SessionHook{});

    const fs::path dir = fs::path(opt.out_dir) / pair_dir_name(a, b) / opt.engine /
                         (spec.dynamic_p0 ? "dynamic" : "static");
    write_file_atomic(dir / "sessions.csv", sessions_csv(result));
    write_file_atomic(dir / "totals.csv", totals_csv({contest_totals(result)}, result.params_hash));
    if (spec.use_async)
        write_file_atomic(dir / "latency.csv",
                          "trader_id,strategy,snapshot_time,order_arrival_time\n" + latency_rows);

    ContestOutcome out;
    out.totals = contest_totals(result);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "contest " << to_cstr(a) << ":" << to_cstr(b) << " " << opt.engine << " "
              << out.totals.treatment << " wins " << out.totals.wins_a << ":" << out.totals.wins_b
              << " draws " << out.totals.draws << " (" << static_cast<long>(out.seconds) << "s)"
              << std::endl;
    return out;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"cda-arena: continuous double auction strategy contests"};
    CliOptions opt;
    app.add_option("--pair", opt.pair_arg, "contest one pair, e.g. AA:ZIC");
    app.add_flag("--all-pairs", opt.all_pairs, "contest all 15 strategy pairs");
    app.add_option("--engine", opt.engine, "session engine")
        ->check(CLI::IsMember({"sync", "async"}));
    app.add_option("--p0", opt.p0, "equilibrium treatment")
        ->check(CLI::IsMember({"static", "dynamic"}));
    app.add_option("--ratios", opt.ratios_arg, "all, or list like 1:19,10:10,19:1");
    app.add_option("--sessions", opt.sessions, "sessions per ratio")->check(CLI::PositiveNumber);
    app.add_option("--seed", opt.seed, "base seed");
    app.add_option("--out", opt.out_dir, "output directory (default $CDA_ARENA_OUT or ./out)");
    app.add_option("--workers", opt.workers, "parallel session workers (sync only)")
        ->check(CLI::PositiveNumber);
    app.add_option("--params", opt.params_file, "strategy parameter file")
        ->check(CLI::ExistingFile);
    app.add_option("--fixture-graph", opt.fixture_file,
                   "build a dominance graph from a totals CSV; no simulation");

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (opt.out_dir.empty()) {
        const char* env = std::getenv("CDA_ARENA_OUT");
        opt.out_dir = env && *env ? env : "out";
    }

    const int modes = (opt.pair_arg.empty() ? 0 : 1) + (opt.all_pairs ? 1 : 0) +
                      (opt.fixture_file.empty() ? 0 : 1);
    if (modes != 1) {
        std::cerr << "error: exactly one of --pair, --all-pairs, --fixture-graph is required\n";
        return 1;
    }

    if (!opt.fixture_file.empty()) return run_fixture_graph(opt);

    StrategyParams params = StrategyParams::defaults();
    if (!opt.params_file.empty()) {
        try {
            params = StrategyParams::from_file(opt.params_file);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }

    std::vector<std::pair<Strategy, Strategy>> pairs;
    if (opt.all_pairs) {
        for (std::size_t i = 0; i < std::size(all_strategies); ++i)
            for (std::size_t j = i + 1; j < std::size(all_strategies); ++j)
                pairs.emplace_back(all_strategies[i], all_strategies[j]);
    } else {
        const auto p = parse_pair(opt.pair_arg);
        if (!p) {
            std::cerr << "error: bad --pair value '" << opt.pair_arg
                      << "' (want e.g. AA:ZIC; names GVWY SHVR ZIC ZIP GDX AA)\n";
            return 1;
        }
        pairs.push_back(*p);
    }

    if (!parse_ratios(opt.ratios_arg, ContestSpec{}.n_per_side)) {
        std::cerr << "error: bad --ratios value '" << opt.ratios_arg << "'\n";
        return 1;
    }

    json manifest;
    manifest["tool"] = "cda-arena";
    manifest["version"] = "1.0.0";
    manifest["mode"] = opt.all_pairs ? "all-pairs" : "pair";
    manifest["flags"] = {{"pair", opt.pair_arg},       {"all_pairs", opt.all_pairs},
                         {"engine", opt.engine},       {"p0", opt.p0},
                         {"ratios", opt.ratios_arg},   {"sessions", opt.sessions},
                         {"seed", opt.seed},           {"out", opt.out_dir},
                         {"workers", opt.workers},     {"params", opt.params_file}};
    manifest["params_hash"] = hex_hash(params.hash());
    manifest["base_seed"] = opt.seed;
    manifest["started_utc"] = now_utc();
    manifest["contests"] = json::array();

    std::vector<PairTotals> totals;
    bool any_failed = false;
    for (const auto& [a, b] : pairs) {
        json entry;
        entry["pair"] = std::string(to_cstr(a)) + ":" + to_cstr(b);
        try {
            const ContestOutcome outcome = run_and_write_contest(opt, a, b, params);
            totals.push_back(outcome.totals);
            entry["status"] = outcome.status;
            entry["wins_a"] = outcome.totals.wins_a;
            entry["wins_b"] = outcome.totals.wins_b;
            entry["draws"] = outcome.totals.draws;
            entry["seconds"] = outcome.seconds;
        } catch (const std::exception& e) {
            entry["status"] = std::string("failed: ") + e.what();
            any_failed = true;
            std::cerr << "error: contest " << to_cstr(a) << ":" << to_cstr(b) << " failed: "
                      << e.what() << "\n";
        }
        manifest["contests"].push_back(entry);
    }

    int exit_code = any_failed ? 2 : 0;
    try {
        if (!totals.empty())
            write_file_atomic(fs::path(opt.out_dir) / "totals.csv",
                              totals_csv(totals, params.hash()));
        if (opt.all_pairs && !any_failed) {
            const DominanceGraph g = build_dominance_graph(totals);
            write_file_atomic(fs::path(opt.out_dir) / "dominance.dot", dominance_dot(g));
        }
        manifest["finished_utc"] = now_utc();
        write_file_atomic(fs::path(opt.out_dir) / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        exit_code = 2;
    }
    return exit_code;
}

}  // namespace cda
