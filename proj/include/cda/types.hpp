#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cda {

// Prices are integer ticks. Quantity is fixed at 1 everywhere: an order is
// filled completely or not at all, so there are no partial-fill states.
using Price = int;
using TraderId = std::int32_t;

struct PriceBounds {
    Price min = 1;
    Price max = 500;
    [[nodiscard]] bool contains(Price p) const { return p >= min && p <= max; }
};

enum class Side : std::uint8_t { bid, ask };

[[nodiscard]] inline Side opposite(Side s) { return s == Side::bid ? Side::ask : Side::bid; }
[[nodiscard]] inline const char* to_cstr(Side s) { return s == Side::bid ? "bid" : "ask"; }

struct Order {
    TraderId trader = -1;
    Side side = Side::bid;
    Price price = 0;
    int quantity = 1;
    double submit_time = 0.0;
    std::uint64_t seq = 0;  // arrival sequence, assigned by the book; FIFO key within a level
};

struct Trade {
    double time = 0.0;
    Price price = 0;
    int quantity = 1;
    TraderId buyer = -1;
    TraderId seller = -1;
    Side initiating_side = Side::bid;  // side of the incoming order that crossed
};

// Tape entry as traders see it: no identities.
struct TradeMark {
    double time = 0.0;
    Price price = 0;
    Side initiating_side = Side::bid;
};

struct Level {
    Price price = 0;
    int quantity = 0;
    int orders = 0;
};

// Anonymized aggregate view of the book. bids are best-first (descending),
// asks best-first (ascending). mid rounds down; spread = best_ask - best_bid.
struct LobSnapshot {
    double time = 0.0;
    std::vector<Level> bids;
    std::vector<Level> asks;
    std::optional<Price> best_bid;
    std::optional<Price> best_ask;
    std::optional<Price> mid;
    std::optional<Price> spread;
    std::optional<TradeMark> last_trade;
    std::uint64_t trade_count = 0;  // cumulative trades this session
    std::uint64_t seq = 0;          // publication sequence, stamped by the engine
};

enum class Strategy : std::uint8_t { GVWY, SHVR, ZIC, ZIP, GDX, AA };

inline constexpr Strategy all_strategies[] = {Strategy::GVWY, Strategy::SHVR, Strategy::ZIC,
                                              Strategy::ZIP,  Strategy::GDX,  Strategy::AA};

[[nodiscard]] inline const char* to_cstr(Strategy s) {
    switch (s) {
        case Strategy::GVWY: return "GVWY";
        case Strategy::SHVR: return "SHVR";
        case Strategy::ZIC: return "ZIC";
        case Strategy::ZIP: return "ZIP";
        case Strategy::GDX: return "GDX";
        case Strategy::AA: return "AA";
    }
    return "?";
}

[[nodiscard]] std::optional<Strategy> parse_strategy(const std::string& name);

// A customer order: trade one unit at `limit` or better. Issued by the
// session orchestrator; the trader must never quote loss-making prices.
struct Assignment {
    Side side = Side::bid;
    Price limit = 0;
    double issue_time = 0.0;
    std::uint64_t id = 0;  // unique within a session
};

}  // namespace cda
