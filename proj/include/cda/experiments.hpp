#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cda/session.hpp"

namespace cda {

struct ExperimentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Per-side strategy counts; the same split is applied to buyers and sellers.
struct Ratio {
    int count_a = 0;
    int count_b = 0;
};

// The 19 splits of n traders per side: 1:(n-1) through (n-1):1.
[[nodiscard]] std::vector<Ratio> all_ratios(int n_per_side);

struct ContestSpec {
    Strategy strategy_a = Strategy::AA;
    Strategy strategy_b = Strategy::ZIC;
    std::vector<Ratio> ratios;  // empty selects all_ratios(n_per_side)
    int sessions_per_ratio = 100;
    int n_per_side = 20;
    bool use_async = false;
    bool dynamic_p0 = false;
    std::uint64_t base_seed = 1;
    int workers = 1;          // parallel session workers (sync contests only)
    SessionConfig session;    // template; population, offset and seed are set per session
};

enum class Winner : std::uint8_t { a, b, draw };

struct SessionRecord {
    Ratio ratio;
    int session_index = 0;
    std::uint64_t seed = 0;
    double appt_a = 0.0;
    double appt_b = 0.0;
    Winner winner = Winner::draw;
};

struct RatioTally {
    Ratio ratio;
    long long wins_a = 0, wins_b = 0, draws = 0;
};

struct ContestResult {
    ContestSpec spec;
    std::vector<RatioTally> per_ratio;
    std::vector<SessionRecord> records;
    long long wins_a = 0, wins_b = 0, draws = 0;
    std::uint64_t params_hash = 0;
};

// The session seed depends only on the unordered pair, engine, treatment,
// ratio and index, and the population is laid out in a canonical strategy
// order, so swapping (a, b) in the spec replays the same sessions with the
// group labels exchanged: win counts swap exactly.
[[nodiscard]] std::uint64_t derive_session_seed(std::uint64_t base_seed, Strategy a, Strategy b,
                                                bool use_async, bool dynamic_p0, const Ratio& r,
                                                int session_index);

// Population for one contest session: buyers then sellers, each side listing
// the lower-numbered strategy's traders first. group 0 = strategy_a.
[[nodiscard]] std::vector<TraderSpec> contest_population(Strategy a, Strategy b, const Ratio& r,
                                                         int n_per_side);

// Sinusoid used for the dynamic-equilibrium treatment: amplitude 20% of the
// band midpoint, one full cycle per third of the session.
[[nodiscard]] OffsetSpec dynamic_offset(const SessionConfig& session);

// Winner by average profit per trader, compared exactly with integer
// cross-multiplication; equal APPT is a draw.
[[nodiscard]] Winner session_winner(long long total_a, int count_a, long long total_b,
                                    int count_b);

// Called once per completed session (serialized when workers > 1); lets
// callers stream per-session data (latency rows, invariant checks) without
// every SessionResult staying resident.
using SessionHook = std::function<void(const SessionRecord&, const SessionResult&)>;

[[nodiscard]] ContestResult run_contest(const ContestSpec& spec, const SessionHook& on_session = {});

// Tournament totals for one unordered pair. engine/treatment tags ride along
// so graphs built from mixed inputs are rejected.
struct PairTotals {
    Strategy a = Strategy::GVWY;
    Strategy b = Strategy::SHVR;
    std::string engine;     // "sync" | "async"
    std::string treatment;  // "static" | "dynamic"
    long long wins_a = 0, wins_b = 0, draws = 0;
};

[[nodiscard]] PairTotals contest_totals(const ContestResult& r);

struct DominanceGraph {
    struct Edge {
        Strategy from = Strategy::GVWY;
        Strategy to = Strategy::GVWY;
        long long wins_from = 0, wins_to = 0;
    };
    std::vector<Edge> edges;
    std::map<Strategy, int> indegree, outdegree;
    std::vector<std::pair<Strategy, Strategy>> ties;  // pairs with equal totals: no edge
    std::string engine, treatment;
};

// Requires totals for all 15 unordered pairs of the six strategies, uniform
// engine/treatment; throws ExperimentError naming whatever is missing.
[[nodiscard]] DominanceGraph build_dominance_graph(const std::vector<PairTotals>& totals);

// digraph text: node labels "NAME\nin/out", one edge per dominance relation,
// edge labels "wins_from:wins_to".
[[nodiscard]] std::string dominance_dot(const DominanceGraph& g);

// Root-mean-square relative deviation of trade prices from the equilibrium
// path, as a percentage. Empty tape has no defined value.
[[nodiscard]] std::optional<double> alpha_convergence(
    const std::vector<Trade>& tape, const std::function<double(double)>& p0_at);

// Schema: pair,engine,treatment,ratio_a,ratio_b,session_index,seed,appt_a,appt_b,winner
[[nodiscard]] std::string sessions_csv(const ContestResult& r);
// Schema: algo_a,algo_b,engine,treatment,wins_a,wins_b,draws (one row per contest)
[[nodiscard]] std::string totals_csv(const std::vector<PairTotals>& totals,
                                     std::uint64_t params_hash);
// Inverse of totals_csv; also used for ingesting externally supplied tallies.
[[nodiscard]] std::vector<PairTotals> parse_totals_csv(const std::string& body);

}  // namespace cda
