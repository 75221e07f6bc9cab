#include "cda/traders.hpp"

#include <cmath>

#include "cda/hash.hpp"

namespace cda {

std::optional<Strategy> parse_strategy(const std::string& name) {
    for (Strategy s : all_strategies)
        if (name == to_cstr(s)) return s;
    return std::nullopt;
}

void Trader::record_fill(const Trade& t) {
    if (!assignment_)
        throw AccountingFault("fill without an active assignment (trader " + std::to_string(id_) +
                              ")");
    const Price lim = assignment_->limit;
    balance_ += std::llabs(static_cast<long long>(lim) - t.price);
    assignment_.reset();
}

std::optional<Price> ShvrTrader::quote(const LobSnapshot& lob, const QuoteContext&) {
    if (side() == Side::bid) {
        if (lob.best_bid) {
            const Price p = *lob.best_bid + 1;
            if (p > limit()) return std::nullopt;  // would shave past the limit
            return p;
        }
        return std::min<Price>(bounds_.min + 1, limit());
    }
    if (lob.best_ask) {
        const Price p = *lob.best_ask - 1;
        if (p < limit()) return std::nullopt;
        return p;
    }
    return std::max<Price>(bounds_.max - 1, limit());
}

std::optional<Price> ZicTrader::quote(const LobSnapshot&, const QuoteContext&) {
    if (side() == Side::bid) {
        std::uniform_int_distribution<Price> d(bounds_.min, limit());
        return d(rng_);
    }
    std::uniform_int_distribution<Price> d(limit(), bounds_.max);
    return d(rng_);
}

std::unique_ptr<Trader> make_trader(Strategy strategy, TraderId id, Side side, PriceBounds bounds,
                                    const StrategyParams& params, std::uint64_t seed,
                                    double session_duration) {
    switch (strategy) {
        case Strategy::GVWY: return std::make_unique<GvwyTrader>(id, side, bounds);
        case Strategy::SHVR: return std::make_unique<ShvrTrader>(id, side, bounds);
        case Strategy::ZIC: return std::make_unique<ZicTrader>(id, side, bounds, seed);
        case Strategy::ZIP: return std::make_unique<ZipTrader>(id, side, bounds, params, seed);
        case Strategy::GDX:
            return std::make_unique<GdxTrader>(id, side, bounds, params, session_duration);
        case Strategy::AA: return std::make_unique<AaTrader>(id, side, bounds, params, seed);
    }
    throw std::logic_error("unknown strategy");
}

}  // namespace cda
