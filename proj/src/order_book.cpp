#include "cda/order_book.hpp"

namespace cda {

bool OrderBook::erase_resting(TraderId trader) {
    auto it = by_trader_.find(trader);
    if (it == by_trader_.end()) return false;
    auto [side, price] = it->second;
    const auto erase_from = [&](auto& levels) {
        auto lvl = levels.find(price);
        auto& q = lvl->second;
        for (auto e = q.begin(); e != q.end(); ++e) {
            if (e->trader == trader) {
                q.erase(e);
                break;
            }
        }
        if (q.empty()) levels.erase(lvl);
    };
    if (side == Side::bid)
        erase_from(bids_);
    else
        erase_from(asks_);
    by_trader_.erase(it);
    return true;
}

bool OrderBook::withdraw(TraderId trader) { return erase_resting(trader); }

OrderBook::SubmitResult OrderBook::submit(TraderId trader, Side side, Price price, double time) {
    SubmitResult res;
    if (!bounds_.contains(price)) return res;  // rejected; prior order untouched

    const bool replaced = erase_resting(trader);

    const auto cross = [&](auto& levels, Price resting_price) {
        auto lvl = levels.begin();
        Entry resting = lvl->second.front();
        lvl->second.pop_front();
        if (lvl->second.empty()) levels.erase(lvl);
        by_trader_.erase(resting.trader);
        Trade t;
        t.time = time;
        t.price = resting_price;
        t.quantity = 1;
        t.initiating_side = side;
        if (side == Side::bid) {
            t.buyer = trader;
            t.seller = resting.trader;
        } else {
            t.buyer = resting.trader;
            t.seller = trader;
        }
        tape_.push_back(t);
        res.status = SubmitStatus::executed;
        res.trade = t;
    };

    if (side == Side::bid) {
        if (!asks_.empty() && price >= asks_.begin()->first) {
            cross(asks_, asks_.begin()->first);
            return res;
        }
        bids_[price].push_back({trader, next_seq_++, time});
    } else {
        if (!bids_.empty() && price <= bids_.begin()->first) {
            cross(bids_, bids_.begin()->first);
            return res;
        }
        asks_[price].push_back({trader, next_seq_++, time});
    }
    by_trader_[trader] = {side, price};
    res.status = replaced ? SubmitStatus::replaced_and_rested : SubmitStatus::rested;
    return res;
}

std::optional<Price> OrderBook::best(Side side) const {
    if (side == Side::bid) {
        if (bids_.empty()) return std::nullopt;
        return bids_.begin()->first;
    }
    if (asks_.empty()) return std::nullopt;
    return asks_.begin()->first;
}

std::optional<Order> OrderBook::resting_order(TraderId trader) const {
    auto it = by_trader_.find(trader);
    if (it == by_trader_.end()) return std::nullopt;
    auto [side, price] = it->second;
    const auto scan = [&](const auto& levels) -> std::optional<Order> {
        auto lvl = levels.find(price);
        for (const Entry& e : lvl->second) {
            if (e.trader == trader) return Order{trader, side, price, 1, e.submit_time, e.seq};
        }
        return std::nullopt;
    };
    return side == Side::bid ? scan(bids_) : scan(asks_);
}

LobSnapshot OrderBook::snapshot(double time) const {
    LobSnapshot s;
    s.time = time;
    s.bids.reserve(bids_.size());
    for (const auto& [price, q] : bids_) {
        const int qty = static_cast<int>(q.size());
        s.bids.push_back({price, qty, qty});
    }
    s.asks.reserve(asks_.size());
    for (const auto& [price, q] : asks_) {
        const int qty = static_cast<int>(q.size());
        s.asks.push_back({price, qty, qty});
    }
    if (!s.bids.empty()) s.best_bid = s.bids.front().price;
    if (!s.asks.empty()) s.best_ask = s.asks.front().price;
    if (s.best_bid && s.best_ask) {
        s.mid = (*s.best_bid + *s.best_ask) / 2;  // rounds down; prices are positive
        s.spread = *s.best_ask - *s.best_bid;
    }
    if (!tape_.empty()) {
        const Trade& t = tape_.back();
        s.last_trade = TradeMark{t.time, t.price, t.initiating_side};
    }
    s.trade_count = tape_.size();
    return s;
}

}  // namespace cda
