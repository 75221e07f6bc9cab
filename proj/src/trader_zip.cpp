#include <cmath>

#include "cda/hash.hpp"
#include "cda/traders.hpp"

namespace cda {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng);
}

}  // namespace

ZipTrader::ZipTrader(TraderId id, Side side, PriceBounds bounds, const StrategyParams& p,
                     std::uint64_t seed)
    : Trader(id, side, bounds), rng_(splitmix64(seed)) {
    beta_ = uniform(rng_, p.get("zip.beta_min"), p.get("zip.beta_max"));
    momentum_ = uniform(rng_, p.get("zip.momentum_min"), p.get("zip.momentum_max"));
    ca_ = p.get("zip.ca");
    cr_ = p.get("zip.cr");
    const double m = uniform(rng_, p.get("zip.margin_init_min"), p.get("zip.margin_init_max"));
    margin_ = side == Side::bid ? -m : m;  // buyers shade down, sellers mark up
}

Price ZipTrader::price_from_margin() const {
    return static_cast<Price>(std::lround(limit_ * (1.0 + margin_)));
}

void ZipTrader::on_assign() {
    limit_ = limit();
    if (!have_price_) {
        price_ = price_from_margin();
        have_price_ = true;
    }
}

Price ZipTrader::target_up(Price p) {
    const double rel = p * (1.0 + cr_ * uniform(rng_, 0.0, 1.0));
    const double abs = ca_ * uniform(rng_, 0.0, 1.0);
    return static_cast<Price>(std::lround(rel + abs));
}

Price ZipTrader::target_down(Price p) {
    const double rel = p * (1.0 - cr_ * uniform(rng_, 0.0, 1.0));
    const double abs = ca_ * uniform(rng_, 0.0, 1.0);
    return static_cast<Price>(std::lround(rel - abs));
}

void ZipTrader::adapt_toward(double target) {
    // Widrow-Hoff with momentum; margin only moves if it keeps its sign
    // (buyers never pay above limit, sellers never undercut theirs).
    const double diff = target - price_;
    const double change = (1.0 - momentum_) * (beta_ * diff) + momentum_ * prev_change_;
    prev_change_ = change;
    if (limit_ <= 0) return;
    const double new_margin = (price_ + change) / limit_ - 1.0;
    if (side() == Side::bid) {
        if (new_margin < 0.0) margin_ = new_margin;
    } else {
        if (new_margin > 0.0) margin_ = new_margin;
    }
    price_ = price_from_margin();
}

void ZipTrader::observe(const MarketEvent& ev) {
    const LobSnapshot& lob = *ev.snapshot;
    const bool deal = ev.kind == MarketEvent::Kind::trade;
    // Execution is at the resting price, so the consumed side is the one the
    // initiator crossed into.
    const bool bid_hit = deal && ev.trade->initiating_side == Side::ask;
    const bool ask_lifted = deal && ev.trade->initiating_side == Side::bid;
    const bool bid_improved =
        lob.best_bid && prev_best_bid_ && *lob.best_bid > *prev_best_bid_;
    const bool ask_improved =
        lob.best_ask && prev_best_ask_ && *lob.best_ask < *prev_best_ask_;

    if (have_price_ && limit_ > 0) {
        const bool active = assignment().has_value();
        if (side() == Side::ask) {
            if (deal) {
                const Price q = ev.trade->price;
                if (price_ <= q) {
                    adapt_toward(target_up(q));  // sold too cheap: raise margin
                } else if (ask_lifted && active) {
                    adapt_toward(target_down(q));  // undercut by the market: chase it
                }
            } else if (ask_improved && lob.best_ask && price_ > *lob.best_ask) {
                const Price t = lob.best_bid ? target_up(*lob.best_bid) : bounds_.max;
                adapt_toward(t);
            }
        } else {
            if (deal) {
                const Price q = ev.trade->price;
                if (price_ >= q) {
                    adapt_toward(target_down(q));  // paid too much: cut the bid
                } else if (bid_hit && active) {
                    adapt_toward(target_up(q));
                }
            } else if (bid_improved && lob.best_bid && price_ < *lob.best_bid) {
                const Price t = lob.best_ask ? target_down(*lob.best_ask) : bounds_.min;
                adapt_toward(t);
            }
        }
    }

    prev_best_bid_ = lob.best_bid;
    prev_best_ask_ = lob.best_ask;
}

std::optional<Price> ZipTrader::quote(const LobSnapshot&, const QuoteContext&) {
    limit_ = limit();
    price_ = price_from_margin();
    have_price_ = true;
    return clamp_quote(price_);
}

}  // namespace cda
