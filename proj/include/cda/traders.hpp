#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "cda/params.hpp"
#include "cda/types.hpp"

namespace cda {

struct AccountingFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Learning stimulus delivered to every trader after each book change. The
// snapshot pointer is engine-owned and valid only for the duration of the
// observe() call.
struct MarketEvent {
    enum class Kind : std::uint8_t { lob_update, trade };
    Kind kind = Kind::lob_update;
    const LobSnapshot* snapshot = nullptr;
    std::optional<TradeMark> trade;  // set when kind == trade
};

struct QuoteContext {
    double time = 0.0;
    double remaining_time = 0.0;
};

// A trader works at most one assignment at a time and quotes only while one
// is active. Strategy state persists across assignments within a session;
// sessions construct fresh traders, so nothing leaks between sessions.
class Trader {
  public:
    Trader(TraderId id, Side side, PriceBounds bounds) : bounds_(bounds), id_(id), side_(side) {}
    virtual ~Trader() = default;

    [[nodiscard]] virtual Strategy strategy() const = 0;
    virtual void observe(const MarketEvent& ev) { (void)ev; }

    // Polled with the current book; engines never call this without an active
    // assignment. A returned price is always within [min, limit] (buyers) or
    // [limit, max] (sellers).
    [[nodiscard]] virtual std::optional<Price> quote(const LobSnapshot& lob,
                                                     const QuoteContext& ctx) = 0;

    void assign(const Assignment& a) {
        assignment_ = a;
        on_assign();
    }
    void clear_assignment() { assignment_.reset(); }
    [[nodiscard]] const std::optional<Assignment>& assignment() const { return assignment_; }

    // balance += |limit - trade.price|; the assignment is consumed. A fill
    // without an active assignment is an accounting fault.
    void record_fill(const Trade& t);

    [[nodiscard]] long long balance() const { return balance_; }
    [[nodiscard]] TraderId id() const { return id_; }
    [[nodiscard]] Side side() const { return side_; }

  protected:
    virtual void on_assign() {}
    [[nodiscard]] Price limit() const { return assignment_->limit; }
    [[nodiscard]] Price clamp_quote(Price p) const {
        if (side_ == Side::bid) return std::clamp(p, bounds_.min, limit());
        return std::clamp(p, limit(), bounds_.max);
    }

    PriceBounds bounds_;

  private:
    TraderId id_;
    Side side_;
    std::optional<Assignment> assignment_;
    long long balance_ = 0;
};

[[nodiscard]] std::unique_ptr<Trader> make_trader(Strategy strategy, TraderId id, Side side,
                                                  PriceBounds bounds, const StrategyParams& params,
                                                  std::uint64_t seed, double session_duration);

// --- Giveaway: quotes the limit price, ignores the book entirely. ---
class GvwyTrader final : public Trader {
  public:
    using Trader::Trader;
    [[nodiscard]] Strategy strategy() const override { return Strategy::GVWY; }
    [[nodiscard]] std::optional<Price> quote(const LobSnapshot&, const QuoteContext&) override {
        return limit();
    }
};

// --- Shaver: improves the same-side best by one tick; stays silent when the
// improved price would cross its own limit. ---
class ShvrTrader final : public Trader {
  public:
    using Trader::Trader;
    [[nodiscard]] Strategy strategy() const override { return Strategy::SHVR; }
    [[nodiscard]] std::optional<Price> quote(const LobSnapshot& lob, const QuoteContext&) override;
};

// --- Zero-Intelligence Constrained: uniform random price on the profitable
// side of the limit. ---
class ZicTrader final : public Trader {
  public:
    ZicTrader(TraderId id, Side side, PriceBounds bounds, std::uint64_t seed)
        : Trader(id, side, bounds), rng_(seed) {}
    [[nodiscard]] Strategy strategy() const override { return Strategy::ZIC; }
    [[nodiscard]] std::optional<Price> quote(const LobSnapshot&, const QuoteContext&) override;

  private:
    std::mt19937_64 rng_;
};

// --- ZIP: adaptive profit margin, driven toward perturbed target prices by a
// Widrow-Hoff rule with momentum. Learns from every market event, quotes
// limit*(1+margin). ---
class ZipTrader final : public Trader {
  public:
    ZipTrader(TraderId id, Side side, PriceBounds bounds, const StrategyParams& p,
              std::uint64_t seed);
    [[nodiscard]] Strategy strategy() const override { return Strategy::ZIP; }
    void observe(const MarketEvent& ev) override;
    [[nodiscard]] std::optional<Price> quote(const LobSnapshot&, const QuoteContext&) override;

    [[nodiscard]] double margin() const { return margin_; }
    [[nodiscard]] Price shout_price() const { return price_; }

  protected:
    void on_assign() override;

  private:
    void adapt_toward(double target);
    [[nodiscard]] Price target_up(Price p);
    [[nodiscard]] Price target_down(Price p);
    [[nodiscard]] Price price_from_margin() const;

    double beta_, momentum_, ca_, cr_;
    double margin_;
    double prev_change_ = 0.0;
    Price price_ = 0;
    Price limit_ = 0;
    bool have_price_ = false;
    std::optional<Price> prev_best_bid_, prev_best_ask_;
    std::mt19937_64 rng_;
};

namespace gdx {

struct Obs {
    Side side = Side::bid;
    Price price = 0;
    bool accepted = false;
};

// GD acceptance likelihood from windowed quote/trade counts:
//   ask a: (taken asks >= a) + (bids >= a)  over  the same + (untaken asks <= a)
//   bid b: (taken bids <= b) + (asks <= b)  over  the same + (untaken bids >= b)
// Evaluated exactly at observed prices; linearly interpolated between them.
class Belief {
  public:
    Belief(const std::deque<Obs>& window, Side quote_side);
    [[nodiscard]] double at(Price p) const;

  private:
    [[nodiscard]] double raw(Price p) const;
    Side side_;
    std::vector<Price> taken_, opposite_, untaken_;  // sorted
    std::vector<Price> anchors_;
    std::vector<double> anchor_values_;
};

struct DpResult {
    Price price = 0;
    double value = 0.0;
};

// Single-unit dynamic program over n remaining quote opportunities:
//   V(0) = 0;  V(k) = max_p  q(p)*S(p) + (1 - q(p))*gamma*V(k-1)
// S is the limit-relative surplus. Ties break toward the passive end
// (sellers high, buyers low).
[[nodiscard]] DpResult optimal_quote(const std::function<double(Price)>& belief, Side side,
                                     Price limit, PriceBounds bounds, int horizon, double gamma);

}  // namespace gdx

// --- GDX: belief-weighted surplus maximization via dynamic programming over
// the quoting opportunities left in the session. Cold start (no history)
// quotes the limit. ---
class GdxTrader final : public Trader {
  public:
    GdxTrader(TraderId id, Side side, PriceBounds bounds, const StrategyParams& p,
              double session_duration);
    [[nodiscard]] Strategy strategy() const override { return Strategy::GDX; }
    void observe(const MarketEvent& ev) override;
    [[nodiscard]] std::optional<Price> quote(const LobSnapshot&, const QuoteContext& ctx) override;

    [[nodiscard]] std::size_t window_size() const { return window_.size(); }

  private:
    void push_obs(const gdx::Obs& o);

    double gamma_;
    int max_horizon_;
    std::size_t window_cap_;
    double duration_;
    std::deque<gdx::Obs> window_;
    std::optional<Price> prev_best_bid_, prev_best_ask_;
    bool dirty_ = true;
    int cached_horizon_ = -1;
    Price cached_limit_ = -1;
    Price cached_quote_ = -1;
};

namespace aa {

// Exponentially shaped interpolation used by the aggressiveness model;
// shape(x in [0,1]) in [0,1], linear in the theta -> 0 limit.
[[nodiscard]] double shape(double x, double theta);
[[nodiscard]] double shape_inv(double v, double theta);

// Target shout price for aggressiveness r in [-1,1]. r = 1 trades at the
// limit, r = 0 aims at the equilibrium estimate, r = -1 is maximally passive.
[[nodiscard]] double target_price(Side side, double r, double theta, double limit, double eq,
                                  PriceBounds bounds);

// Inverse map: the aggressiveness whose target equals price y.
[[nodiscard]] double aggressiveness_for(Side side, double y, double theta, double limit, double eq,
                                        PriceBounds bounds);

}  // namespace aa

// --- AA: adaptive-aggressiveness trader. Tracks a decay-weighted moving
// average of trade prices as its equilibrium estimate, adapts a long-term
// shape parameter theta from price dispersion, and moves its aggressiveness
// r by short-term event-driven updates; quotes step toward the target price.
// Cold start quotes limit -/+ 10% before any trade is observed. ---
class AaTrader final : public Trader {
  public:
    AaTrader(TraderId id, Side side, PriceBounds bounds, const StrategyParams& p,
             std::uint64_t seed);
    [[nodiscard]] Strategy strategy() const override { return Strategy::AA; }
    void observe(const MarketEvent& ev) override;
    [[nodiscard]] std::optional<Price> quote(const LobSnapshot&, const QuoteContext&) override;

    [[nodiscard]] double aggressiveness() const { return r_; }
    [[nodiscard]] double theta() const { return theta_; }
    [[nodiscard]] std::optional<double> eq_estimate() const { return eq_; }

  private:
    void short_term_update(bool more_aggressive, double ref_price);

    double beta_short_, beta_long_, lambda_rel_, lambda_abs_, eta_;
    double eq_decay_;
    int eq_window_;
    double theta_min_, theta_max_, theta_gamma_, cold_margin_;
    double r_, theta_;
    std::deque<double> recent_trades_;
    std::optional<double> eq_;
    double eq_sum_ = 0.0, eq_sumsq_ = 0.0;
    long eq_n_ = 0;
    double alpha_ = 0.0;
    std::optional<double> alpha_min_, alpha_max_;
    Price limit_ = 0;
    bool have_limit_ = false;
    std::optional<Price> prev_best_bid_, prev_best_ask_;
};

}  // namespace cda
