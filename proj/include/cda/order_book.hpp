#pragma once

#include <deque>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "cda/types.hpp"

namespace cda {

// Price-time-priority limit order book for single-unit orders, with the
// replace-on-submit discipline: a trader holds at most one resting order
// across both sides, and submitting removes any prior one before matching.
//
// A spread-crossing order executes immediately at the *resting* order's
// price. Quantities are 1, so a submission yields at most one trade and the
// book can never be left crossed.
class OrderBook {
  public:
    enum class SubmitStatus : std::uint8_t { rejected, rested, replaced_and_rested, executed };

    struct SubmitResult {
        SubmitStatus status = SubmitStatus::rejected;
        std::optional<Trade> trade;
        [[nodiscard]] bool book_changed() const { return status != SubmitStatus::rejected; }
    };

    explicit OrderBook(PriceBounds bounds = {}) : bounds_(bounds) {}

    // Rejects prices outside bounds (prior order is left untouched).
    SubmitResult submit(TraderId trader, Side side, Price price, double time);

    // Removes the trader's resting order if any. Used by session orchestration
    // when an unfilled assignment is replaced. Returns true if the book changed.
    bool withdraw(TraderId trader);

    [[nodiscard]] std::optional<Price> best(Side side) const;
    [[nodiscard]] std::optional<Order> resting_order(TraderId trader) const;
    [[nodiscard]] std::size_t order_count() const { return by_trader_.size(); }
    [[nodiscard]] const std::vector<Trade>& tape() const { return tape_; }
    [[nodiscard]] const PriceBounds& bounds() const { return bounds_; }

    // Aggregated anonymous view. seq is left 0 for the publisher to stamp.
    [[nodiscard]] LobSnapshot snapshot(double time) const;

  private:
    struct Entry {
        TraderId trader;
        std::uint64_t seq;
        double submit_time;
    };
    using BidLevels = std::map<Price, std::deque<Entry>, std::greater<Price>>;
    using AskLevels = std::map<Price, std::deque<Entry>>;

    bool erase_resting(TraderId trader);

    PriceBounds bounds_;
    BidLevels bids_;
    AskLevels asks_;
    std::unordered_map<TraderId, std::pair<Side, Price>> by_trader_;
    std::vector<Trade> tape_;
    std::uint64_t next_seq_ = 1;
};

}  // namespace cda
