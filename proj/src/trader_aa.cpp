#include <algorithm>
#include <cmath>
#include <random>

#include "cda/traders.hpp"

namespace cda {
namespace aa {

double shape(double x, double theta) {
    if (std::fabs(theta) < 1e-8) return x;
    return std::expm1(x * theta) / std::expm1(theta);
}

double shape_inv(double v, double theta) {
    v = std::clamp(v, 0.0, 1.0);
    if (std::fabs(theta) < 1e-8) return v;
    return std::log1p(v * std::expm1(theta)) / theta;
}

double target_price(Side side, double r, double theta, double limit, double eq,
                    PriceBounds bounds) {
    r = std::clamp(r, -1.0, 1.0);
    const double lo = bounds.min;
    const double hi = bounds.max;
    if (side == Side::bid) {
        if (limit >= eq) {  // intramarginal: can trade at the equilibrium
            if (r >= 0.0) return eq + (limit - eq) * shape(r, theta);
            return eq - (eq - lo) * shape(-r, theta);
        }
        if (r >= 0.0) return limit;
        return limit - (limit - lo) * shape(-r, theta);
    }
    if (limit <= eq) {
        if (r >= 0.0) return eq - (eq - limit) * shape(r, theta);
        return eq + (hi - eq) * shape(-r, theta);
    }
    if (r >= 0.0) return limit;
    return limit + (hi - limit) * shape(-r, theta);
}

double aggressiveness_for(Side side, double y, double theta, double limit, double eq,
                          PriceBounds bounds) {
    const double lo = bounds.min;
    const double hi = bounds.max;
    double r = 0.0;
    if (side == Side::bid) {
        if (limit >= eq) {
            if (y >= eq) {
                const double den = limit - eq;
                r = den > 0.0 ? shape_inv((y - eq) / den, theta) : 0.0;
            } else {
                const double den = eq - lo;
                r = den > 0.0 ? -shape_inv((eq - y) / den, theta) : 0.0;
            }
        } else if (y < limit) {
            const double den = limit - lo;
            r = den > 0.0 ? -shape_inv((limit - y) / den, theta) : 0.0;
        }
    } else {
        if (limit <= eq) {
            if (y <= eq) {
                const double den = eq - limit;
                r = den > 0.0 ? shape_inv((eq - y) / den, theta) : 0.0;
            } else {
                const double den = hi - eq;
                r = den > 0.0 ? -shape_inv((y - eq) / den, theta) : 0.0;
            }
        } else if (y > limit) {
            const double den = hi - limit;
            r = den > 0.0 ? -shape_inv((y - limit) / den, theta) : 0.0;
        }
    }
    return std::clamp(r, -1.0, 1.0);
}

}  // namespace aa

AaTrader::AaTrader(TraderId id, Side side, PriceBounds bounds, const StrategyParams& p,
                   std::uint64_t seed)
    : Trader(id, side, bounds) {
    std::mt19937_64 rng(seed);
    const auto udraw = [&rng](double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(rng);
    };
    beta_short_ = udraw(p.get("aa.beta_short_min"), p.get("aa.beta_short_max"));
    beta_long_ = udraw(p.get("aa.beta_long_min"), p.get("aa.beta_long_max"));
    r_ = udraw(p.get("aa.r_init_min"), p.get("aa.r_init_max"));
    lambda_rel_ = p.get("aa.lambda_rel");
    lambda_abs_ = p.get("aa.lambda_abs");
    eta_ = p.get("aa.eta");
    eq_decay_ = p.get("aa.eq_decay");
    eq_window_ = p.get_int("aa.eq_window");
    theta_min_ = p.get("aa.theta_min");
    theta_max_ = p.get("aa.theta_max");
    theta_gamma_ = p.get("aa.theta_gamma");
    cold_margin_ = p.get("aa.cold_start_margin");
    theta_ = p.get("aa.theta_init");
}

void AaTrader::short_term_update(bool more_aggressive, double ref_price) {
    const double r_shout = aa::aggressiveness_for(side(), ref_price, theta_, limit_, *eq_, bounds_);
    const double delta = more_aggressive ? (1.0 + lambda_rel_) * r_shout + lambda_abs_
                                         : (1.0 - lambda_rel_) * r_shout - lambda_abs_;
    r_ = std::clamp(r_ + beta_short_ * (delta - r_), -1.0, 1.0);
}

void AaTrader::observe(const MarketEvent& ev) {
    const LobSnapshot& lob = *ev.snapshot;
    if (ev.kind == MarketEvent::Kind::trade) {
        const double q = static_cast<double>(ev.trade->price);
        recent_trades_.push_back(q);
        while (static_cast<int>(recent_trades_.size()) > eq_window_) recent_trades_.pop_front();
        // Decay-weighted mean, newest trade carrying weight 1.
        double w = 1.0, num = 0.0, den = 0.0;
        for (auto it = recent_trades_.rbegin(); it != recent_trades_.rend(); ++it) {
            num += w * *it;
            den += w;
            w *= eq_decay_;
        }
        eq_ = num / den;

        eq_sum_ += q;
        eq_sumsq_ += q * q;
        ++eq_n_;
        const double ph = *eq_;
        const double n = static_cast<double>(eq_n_);
        const double var = eq_sumsq_ / n - 2.0 * ph * (eq_sum_ / n) + ph * ph;
        alpha_ = ph > 0.0 ? std::sqrt(std::max(0.0, var)) / ph : 0.0;
        if (!alpha_min_ || alpha_ < *alpha_min_) alpha_min_ = alpha_;
        if (!alpha_max_ || alpha_ > *alpha_max_) alpha_max_ = alpha_;

        double abar = 0.4;  // neutral until dispersion shows any range
        if (*alpha_max_ > *alpha_min_) abar = (alpha_ - *alpha_min_) / (*alpha_max_ - *alpha_min_);
        const double desired =
            theta_min_ +
            (theta_max_ - theta_min_) * (1.0 - abar * std::exp(theta_gamma_ * (abar - 1.0)));
        theta_ += beta_long_ * (desired - theta_);

        if (have_limit_) {
            const double tau =
                aa::target_price(side(), r_, theta_, static_cast<double>(limit_), ph, bounds_);
            const bool more = side() == Side::bid ? q >= tau : q <= tau;
            short_term_update(more, q);
        }
    } else if (eq_ && have_limit_) {
        // A rival improving the book past this trader's target forces it to
        // compete harder; favorable improvements carry no signal here.
        const bool bid_improved =
            lob.best_bid && (!prev_best_bid_ || *lob.best_bid > *prev_best_bid_);
        const bool ask_improved =
            lob.best_ask && (!prev_best_ask_ || *lob.best_ask < *prev_best_ask_);
        const double tau =
            aa::target_price(side(), r_, theta_, static_cast<double>(limit_), *eq_, bounds_);
        if (side() == Side::bid) {
            if (bid_improved && static_cast<double>(*lob.best_bid) > tau)
                short_term_update(true, static_cast<double>(*lob.best_bid));
        } else {
            if (ask_improved && static_cast<double>(*lob.best_ask) < tau)
                short_term_update(true, static_cast<double>(*lob.best_ask));
        }
    }
    prev_best_bid_ = lob.best_bid;
    prev_best_ask_ = lob.best_ask;
}

std::optional<Price> AaTrader::quote(const LobSnapshot& lob, const QuoteContext&) {
    limit_ = limit();
    have_limit_ = true;
    if (!eq_) {
        const double m = side() == Side::bid ? 1.0 - cold_margin_ : 1.0 + cold_margin_;
        return clamp_quote(static_cast<Price>(std::lround(limit_ * m)));
    }
    // No quote when the touch already sits at or past the limit: nothing can
    // be gained by improving it, and the standing order (if any) stays put.
    if (side() == Side::bid && lob.best_bid && limit_ <= *lob.best_bid) return std::nullopt;
    if (side() == Side::ask && lob.best_ask && limit_ >= *lob.best_ask) return std::nullopt;
    const double tau =
        aa::target_price(side(), r_, theta_, static_cast<double>(limit_), *eq_, bounds_);
    // An opposite-side best already at or past the target is taken outright
    // (execution lands at that resting price); otherwise edge from the
    // own-side best toward the target.
    double base;
    if (side() == Side::bid) {
        if (lob.best_ask && static_cast<double>(*lob.best_ask) <= tau)
            return clamp_quote(*lob.best_ask);
        base = lob.best_bid ? static_cast<double>(*lob.best_bid) : static_cast<double>(bounds_.min);
    } else {
        if (lob.best_bid && static_cast<double>(*lob.best_bid) >= tau)
            return clamp_quote(*lob.best_bid);
        base = lob.best_ask ? static_cast<double>(*lob.best_ask) : static_cast<double>(bounds_.max);
    }
    return clamp_quote(static_cast<Price>(std::lround(base + (tau - base) / eta_)));
}

}  // namespace cda
