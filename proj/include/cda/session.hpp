#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "cda/params.hpp"
#include "cda/schedule.hpp"
#include "cda/traders.hpp"
#include "cda/types.hpp"

namespace cda {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One member of the session population.
struct TraderSpec {
    Strategy strategy = Strategy::ZIC;
    Side side = Side::bid;
    int group = 0;                  // contest label (A=0, B=1); carried into results
    double injected_delay_s = 0.0;  // async engine: sleep inserted before every submission
};

struct SessionConfig {
    std::vector<TraderSpec> population;

    Price band_lo = 50;
    Price band_hi = 150;
    int jitter = 2;
    OffsetSpec offset;
    AllocationMode allocation = AllocationMode::shuffled;
    ReplenishSpec replenish;

    PriceBounds bounds;
    StrategyParams params = StrategyParams::defaults();

    double duration = 180.0;  // simulated seconds; also the issuance horizon
    double slice_length = 0.0;          // sync engine time slice; 0 derives 1/(10N)
    double wall_clock_duration = 10.0;  // async engine run time, real seconds
    std::uint64_t seed = 1;

    bool collect_latency = false;
    bool collect_submissions = false;
};

// Throws ConfigError on an unusable config: empty or one-sided population,
// nonpositive durations, band outside the price bounds, or balanced_group
// paired with a drip mode (pairing is only meaningful when both copies of a
// limit are issued in the same wave).
void validate(const SessionConfig& cfg);

// Stable digest of every behavior-affecting field, params included. Two
// configs with equal hashes replay identically under the same engine.
[[nodiscard]] std::uint64_t config_hash(const SessionConfig& cfg);

// Display names, index = TraderId: buyers B00, B01, ... sellers S00, S01, ...
[[nodiscard]] std::vector<std::string> trader_names(const std::vector<TraderSpec>& population);

// Completed trade plus both parties' limits at fill time; conservation checks
// need these without replaying issuance.
struct TradeAudit {
    Trade trade;
    Price buyer_limit = 0;
    Price seller_limit = 0;
};

struct LatencyRow {
    TraderId trader = -1;
    std::uint64_t event_seq = 0;  // snapshot the trader reacted to
    double event_time = 0.0;      // publish instant, seconds from session start
    double submit_time = 0.0;     // arrival at the exchange queue
    TraderId caused_by = -1;      // whose action produced that snapshot; -1 = session start
};

// Race forensics: which snapshot a submission was computed from, where it
// landed in arrival order, and whether it improved the touch on entry.
struct SubmissionRow {
    TraderId trader = -1;
    std::uint64_t reacted_seq = 0;
    std::uint64_t arrival_seq = 0;
    bool improved_best = false;
};

struct SessionResult {
    std::vector<std::string> trader_names;  // index = TraderId
    std::vector<TraderSpec> population;
    std::vector<Trade> tape;
    std::vector<TradeAudit> audit;
    std::vector<long long> profit;        // per trader
    std::vector<int> fills;               // per trader
    std::vector<int> assignments_issued;  // per trader
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    double duration = 0.0;
    double wall_clock_elapsed = 0.0;
    std::vector<LatencyRow> latency;
    std::vector<SubmissionRow> submissions;

    [[nodiscard]] long long group_profit(int group) const;
    [[nodiscard]] int group_size(int group) const;
    [[nodiscard]] double appt(int group) const;  // group_profit / group_size
};

// Everything both engines derive from a config before trading starts. The
// issuance order inside each round is already permuted; engines consume
// timeline entries as round_alloc[round][slot].
struct SessionPlan {
    SupplyDemandSchedule schedule;
    std::vector<IssueEvent> timeline;  // nondecreasing time
    std::vector<std::vector<std::pair<TraderId, Price>>> round_alloc;
    int rounds = 0;
};

[[nodiscard]] SessionPlan build_session_plan(const SessionConfig& cfg);

// Instantiates the population; trader idx seeds derive from the session seed,
// so a config+seed pair pins every stochastic strategy draw.
[[nodiscard]] std::vector<std::unique_ptr<Trader>> build_traders(const SessionConfig& cfg);

// Assignment limit for a base rung issued at time t: base plus the schedule
// offset, clamped to the price bounds.
[[nodiscard]] Price issued_limit(Price base, const OffsetSpec& offset, double t,
                                 PriceBounds bounds);

// Schema: trader_id,strategy,side,group,profit,fills
[[nodiscard]] std::string profits_csv(const SessionResult& r);
// Schema: trader_id,strategy,snapshot_time,order_arrival_time
[[nodiscard]] std::string latency_csv(const SessionResult& r);
// Schema: trader_id,reacted_seq,arrival_seq,improved_best
[[nodiscard]] std::string submissions_csv(const SessionResult& r);

// Engine entry points. Both run one session to completion and return the
// authoritative exchange-side accounting.
//   sync: deterministic discrete time; identical (config, seed) pairs produce
//         bitwise identical results.
//   async: one thread per trader against a live exchange thread; wall-clock
//          paced, nondeterministic by design.
[[nodiscard]] SessionResult run_sync_session(const SessionConfig& cfg);
[[nodiscard]] SessionResult run_async_session(const SessionConfig& cfg);

}  // namespace cda
