#include <algorithm>
#include <cmath>

#include "cda/traders.hpp"

namespace cda {
namespace gdx {

Belief::Belief(const std::deque<Obs>& window, Side quote_side) : side_(quote_side) {
    const Side own = quote_side;
    for (const Obs& o : window) {
        if (o.side == own) {
            if (o.accepted)
                taken_.push_back(o.price);
            else
                untaken_.push_back(o.price);
        } else {
            opposite_.push_back(o.price);
        }
        anchors_.push_back(o.price);
    }
    std::sort(taken_.begin(), taken_.end());
    std::sort(untaken_.begin(), untaken_.end());
    std::sort(opposite_.begin(), opposite_.end());
    std::sort(anchors_.begin(), anchors_.end());
    anchors_.erase(std::unique(anchors_.begin(), anchors_.end()), anchors_.end());
    anchor_values_.reserve(anchors_.size());
    for (Price a : anchors_) anchor_values_.push_back(raw(a));
}

double Belief::raw(Price p) const {
    const auto count_geq = [](const std::vector<Price>& v, Price x) {
        return static_cast<double>(v.end() - std::lower_bound(v.begin(), v.end(), x));
    };
    const auto count_leq = [](const std::vector<Price>& v, Price x) {
        return static_cast<double>(std::upper_bound(v.begin(), v.end(), x) - v.begin());
    };
    double favourable, contrary;
    if (side_ == Side::ask) {
        // Asks taken at >= p, or bids seen at >= p, argue p would transact;
        // asks left untaken at <= p argue it would not.
        favourable = count_geq(taken_, p) + count_geq(opposite_, p);
        contrary = count_leq(untaken_, p);
    } else {
        favourable = count_leq(taken_, p) + count_leq(opposite_, p);
        contrary = count_geq(untaken_, p);
    }
    const double total = favourable + contrary;
    if (total == 0.0) return 0.0;
    return favourable / total;
}

double Belief::at(Price p) const {
    if (anchors_.empty()) return 0.0;
    if (p <= anchors_.front() || p >= anchors_.back()) return raw(p);
    const auto it = std::lower_bound(anchors_.begin(), anchors_.end(), p);
    const std::size_t hi = static_cast<std::size_t>(it - anchors_.begin());
    if (anchors_[hi] == p) return anchor_values_[hi];
    const std::size_t lo = hi - 1;
    const double t =
        static_cast<double>(p - anchors_[lo]) / static_cast<double>(anchors_[hi] - anchors_[lo]);
    return (1.0 - t) * anchor_values_[lo] + t * anchor_values_[hi];
}

DpResult optimal_quote(const std::function<double(Price)>& belief, Side side, Price limit,
                       PriceBounds bounds, int horizon, double gamma) {
    const Price lo = side == Side::ask ? limit : bounds.min;
    const Price hi = side == Side::ask ? bounds.max : limit;
    const int n = hi - lo + 1;
    std::vector<double> q(static_cast<std::size_t>(n));
    std::vector<double> s(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Price p = lo + i;
        q[static_cast<std::size_t>(i)] = belief(p);
        s[static_cast<std::size_t>(i)] =
            side == Side::ask ? static_cast<double>(p - limit) : static_cast<double>(limit - p);
    }
    double v_prev = 0.0;
    DpResult best{side == Side::ask ? hi : lo, 0.0};
    for (int k = 1; k <= horizon; ++k) {
        double v_k = -1.0;
        Price arg = lo;
        for (int i = 0; i < n; ++i) {
            const std::size_t ui = static_cast<std::size_t>(i);
            const double value = q[ui] * s[ui] + (1.0 - q[ui]) * gamma * v_prev;
            // >= keeps the last (highest) tied price; sellers prefer passive
            // high quotes, buyers passive low ones.
            const bool better = side == Side::ask ? value >= v_k : value > v_k;
            if (better) {
                v_k = value;
                arg = lo + i;
            }
        }
        v_prev = v_k;
        best = {arg, v_k};
    }
    return best;
}

}  // namespace gdx

GdxTrader::GdxTrader(TraderId id, Side side, PriceBounds bounds, const StrategyParams& p,
                     double session_duration)
    : Trader(id, side, bounds),
      gamma_(p.get("gdx.gamma")),
      max_horizon_(p.get_int("gdx.max_horizon")),
      window_cap_(static_cast<std::size_t>(p.get_int("gdx.history_window"))),
      duration_(session_duration) {}

void GdxTrader::push_obs(const gdx::Obs& o) {
    window_.push_back(o);
    if (window_.size() > window_cap_) window_.pop_front();
    dirty_ = true;
}

void GdxTrader::observe(const MarketEvent& ev) {
    const LobSnapshot& lob = *ev.snapshot;
    if (ev.kind == MarketEvent::Kind::trade) {
        // The resting side's quote is the one that transacted at this price;
        // flip its most recent sighting to accepted (or record it directly if
        // the sighting already fell out of the window).
        const Side resting = opposite(ev.trade->initiating_side);
        bool marked = false;
        for (auto it = window_.rbegin(); it != window_.rend(); ++it) {
            if (it->side == resting && it->price == ev.trade->price && !it->accepted) {
                it->accepted = true;
                marked = true;
                dirty_ = true;
                break;
            }
        }
        if (!marked) push_obs({resting, ev.trade->price, true});
    }
    if (lob.best_bid && (!prev_best_bid_ || *prev_best_bid_ != *lob.best_bid))
        push_obs({Side::bid, *lob.best_bid, false});
    if (lob.best_ask && (!prev_best_ask_ || *prev_best_ask_ != *lob.best_ask))
        push_obs({Side::ask, *lob.best_ask, false});
    prev_best_bid_ = lob.best_bid;
    prev_best_ask_ = lob.best_ask;
}

std::optional<Price> GdxTrader::quote(const LobSnapshot&, const QuoteContext& ctx) {
    if (window_.empty()) return limit();  // cold start: zero-surplus safe quote

    const double frac = duration_ > 0.0 ? std::max(0.0, ctx.remaining_time) / duration_ : 0.0;
    const int horizon = std::max(1, static_cast<int>(std::ceil(max_horizon_ * frac)));
    if (dirty_ || horizon != cached_horizon_ || limit() != cached_limit_) {
        const gdx::Belief belief(window_, side());
        const auto res = gdx::optimal_quote([&](Price p) { return belief.at(p); }, side(), limit(),
                                            bounds_, horizon, gamma_);
        cached_quote_ = res.price;
        cached_horizon_ = horizon;
        cached_limit_ = limit();
        dirty_ = false;
    }
    return clamp_quote(cached_quote_);
}

}  // namespace cda
