#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "cda/types.hpp"

namespace cda {

struct ScheduleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Additive shift applied to every base limit at issuance time. The sinusoid
// value is rounded to the nearest tick, so a shifted schedule stays on-grid
// and the equilibrium price translates exactly with the offset.
struct OffsetSpec {
    enum class Kind : std::uint8_t { none, sinusoid };
    Kind kind = Kind::none;
    double amplitude = 0.0;  // ticks
    double period = 0.0;     // seconds per full cycle
    double phase = 0.0;      // radians

    [[nodiscard]] Price at(double t) const;
};

// Base limit prices for one market session. demand holds one buyer limit per
// buyer (any order), supply one seller limit per seller.
struct SupplyDemandSchedule {
    std::vector<Price> demand;
    std::vector<Price> supply;
    OffsetSpec offset;
};

struct Equilibrium {
    Price p0 = 0;  // midpoint of the intersection range, rounded down
    int q0 = 0;    // largest q with q-th highest demand >= q-th lowest supply
};

// Theoretical competitive equilibrium of the offset-shifted step curves at
// time t. Empty when the curves do not intersect.
[[nodiscard]] std::optional<Equilibrium> equilibrium(const SupplyDemandSchedule& s, double t);

struct ScheduleGenConfig {
    int n_buyers = 20;
    int n_sellers = 20;
    Price band_lo = 50;
    Price band_hi = 150;
    int jitter = 2;  // uniform per-rung tick jitter in [-jitter, +jitter]
    OffsetSpec offset;
};

// Evenly spaced rungs across the band, demand descending from band_hi and
// supply ascending from band_lo, each rung jittered then clamped to the band.
// Requires band width >= n-1 (distinct rungs) and >= 2*jitter (intersection
// survives jitter); throws ScheduleError otherwise.
[[nodiscard]] SupplyDemandSchedule generate_symmetric_schedule(const ScheduleGenConfig& cfg,
                                                               std::uint64_t seed);

enum class AllocationMode : std::uint8_t { shuffled, balanced_group };

struct AllocationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Trader slot as the allocator sees it: an index into the session population
// plus the strategy label used for balanced-group pairing.
struct AllocSlot {
    TraderId trader = -1;
    Strategy strategy = Strategy::GVWY;
};

// Maps one side's base limits onto that side's traders.
//   shuffled: random permutation of the limits.
//   balanced_group: limits sorted descending; the value at each even index is
//     issued twice, once to the k-th trader of each strategy, so both
//     strategies hold identical limit multisets. Requires an even trader
//     count split equally between exactly two strategies.
[[nodiscard]] std::vector<std::pair<TraderId, Price>> allocate_base_limits(
    const std::vector<Price>& side_limits, const std::vector<AllocSlot>& traders,
    AllocationMode mode, std::uint64_t seed);

struct ReplenishSpec {
    enum class Mode : std::uint8_t { synchronous_all, drip_regular, drip_stochastic };
    Mode mode = Mode::drip_stochastic;
    int assignments_per_trader = 4;
    double interval = 0.0;  // drip_regular spacing; 0 derives duration/(apt*n)
};

// One planned assignment issuance. round selects the allocation wave; slot is
// a position in that round's trader order (the engine applies its own
// per-round permutation). Events past the session end are simply never issued.
struct IssueEvent {
    double time = 0.0;
    int round = 0;
    int slot = 0;
};

[[nodiscard]] std::vector<IssueEvent> build_issuance_timeline(const ReplenishSpec& spec,
                                                              double duration, int n_traders,
                                                              std::uint64_t seed);

// CSV rows `side,base_limit` followed by a `# config:` comment line holding a
// JSON block (offset kind/params, generator seed).
[[nodiscard]] std::string schedule_dump(const SupplyDemandSchedule& s, std::uint64_t seed);

}  // namespace cda
